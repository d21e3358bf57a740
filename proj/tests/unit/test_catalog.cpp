#include <gtest/gtest.h>

#include <cctype>

#include "hidsym/catalog.hpp"

using namespace hidsym;

class Manifest : public ::testing::TestWithParam<std::string> {};

TEST_P(Manifest, EveryItemMeetsItsExpectation) {
  CatalogEntry e = catalog_entry(GetParam());
  ASSERT_FALSE(e.manifest.empty());
  for (const auto& item : e.manifest) {
    auto r = run_manifest_item(e, item);
    EXPECT_EQ(r.pass, item.expect_pass) << GetParam() << " " << item.check << " " << item.target << " "
                                        << r.max_rel;
  }
}

INSTANTIATE_TEST_SUITE_P(All, Manifest, ::testing::ValuesIn(catalog_names()), [](const auto& info) {
  std::string s;
  for (char c : info.param) s += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return s;
});

TEST(Entries, TaubNutIsEuclidean) {
  auto e = taub_nut(1.0);
  EXPECT_EQ(e.manifold.signature(), (std::vector<int>{1, 1, 1, 1}));
  EXPECT_EQ(e.manifold.chart().coordinates(), (std::vector<std::string>{"r", "theta", "phi", "chi"}));
  EXPECT_TRUE(e.frame.has_value());
  for (const char* f : {"f1", "f2", "f3", "fY", "f1_raw"}) EXPECT_TRUE(e.forms.count(f)) << f;
  for (const char* v : {"R1", "R2", "R3", "dchi", "r_dr"}) EXPECT_TRUE(e.vectors.count(v)) << v;
}

TEST(Entries, TaubNutMassMustBePositive) {
  EXPECT_THROW(taub_nut(0.0), std::invalid_argument);
  EXPECT_THROW(taub_nut(-1.0), std::invalid_argument);
  auto e = catalog_entry("taub-nut", {{"m", 2.0}});
  EXPECT_EQ(e.manifold.params().at("m"), 2.0);
}

TEST(Entries, FlatChristoffelsVanish) {
  auto e = flat(3);
  const auto& gam = e.manifold.christoffel();
  for (const auto& c : gam) EXPECT_TRUE(c.is_zero());
}

TEST(Entries, PseudoSphereMetadata) {
  auto e = pseudo_sphere_fixture();
  EXPECT_EQ(e.metadata.at("einstein_constant"), "2");
  ASSERT_TRUE(e.structure.has_value());
  EXPECT_EQ(e.structure->eps, (std::array<int, 3>{1, -1, -1}));
}

TEST(Lookup, NamesAndSignatures) {
  EXPECT_EQ(catalog_entry("minkowski4").manifold.signature(), (std::vector<int>{-1, 1, 1, 1}));
  EXPECT_EQ(catalog_entry("flat2,2").manifold.signature(), (std::vector<int>{1, 1, -1, -1}));
  EXPECT_EQ(catalog_entry("flat3").manifold.dim(), 3u);
  for (const char* bad : {"flat", "flatx", "sphere3", "minkowski", "flat2,2,2", ""})
    EXPECT_THROW(catalog_entry(bad), std::invalid_argument) << bad;
}

TEST(Lookup, ExpectedOutcome) {
  auto e = taub_nut(1.0);
  EXPECT_EQ(expected_outcome(e, "covconst", "fY"), false);
  EXPECT_EQ(expected_outcome(e, "ky", "fY"), true);
  EXPECT_FALSE(expected_outcome(e, "ky", "nothing").has_value());
}

TEST(RunCheck, UnknownCheckOrTargetThrows) {
  auto e = flat(3);
  EXPECT_THROW(run_check(e, "no-such-check", "T1"), std::invalid_argument);
  EXPECT_ANY_THROW(run_check(e, "killing-vector", "no-such-field"));
}
