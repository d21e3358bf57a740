#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "hidsym/catalog.hpp"
#include "hidsym_cli/cli.hpp"
#include "hidsym_cli/manifold_file.hpp"

using namespace hidsym;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
  [[nodiscard]] std::vector<json> lines() const {
    std::vector<json> v;
    std::istringstream is(out);
    std::string line;
    while (std::getline(is, line))
      if (!line.empty()) v.push_back(json::parse(line));
    return v;
  }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir() {
  static fs::path p = [] {
    fs::path d = fs::temp_directory_path() / ("hidsym_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return p;
}

fs::path write_file(const std::string& name, const std::string& body) {
  fs::path p = temp_dir() / name;
  std::ofstream(p) << body;
  return p;
}

const std::vector<std::string> kKinds{"killing-vector", "conformal-killing", "cky", "ky", "sk",
                                      "covconst",       "unit-root",         "quaternion"};

}  // namespace

TEST(Examples, KillingYanoFY) {
  auto r = run({"check", "ky", "--catalog", "taub-nut", "--target", "fY"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  auto v = r.lines();
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0]["check"], "ky");
  EXPECT_EQ(v[0]["target"], "fY");
  EXPECT_EQ(v[0]["pass"], true);
  EXPECT_EQ(v[0]["points"], 20);
  EXPECT_EQ(v[0]["seed"], 0);
  EXPECT_EQ(v[0]["tolerance"], 1e-9);
  for (const char* k : {"max_residual", "max_relative_residual", "worst_point", "extra"}) EXPECT_TRUE(v[0].contains(k));
}

TEST(Examples, CovariantConstancyFailsAsExpected) {
  auto r = run({"check", "covconst", "--catalog", "taub-nut", "--target", "fY"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  auto v = r.lines();
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0]["pass"], false);
}

TEST(Examples, JacobiToCutoffTen) {
  auto r = run({"algebra", "jacobi", "--cutoff", "10"});
  EXPECT_EQ(r.code, cli::kOk);
  for (const auto& j : r.lines()) {
    EXPECT_EQ(j["pass"], true) << j.dump();
    EXPECT_EQ(j["max_residual"], 0.0);
  }
}

TEST(ExitCodes, UnmetExpectationIsOne) {
  auto r = run({"check", "ky", "--catalog", "taub-nut", "--target", "fY", "--tol", "1e-30"});
  EXPECT_EQ(r.code, cli::kCheckFailed);
}

TEST(ExitCodes, InputErrorsAreTwo) {
  EXPECT_EQ(run({"check", "ky", "--catalog", "no-such-entry", "--target", "fY"}).code, cli::kInputError);
  EXPECT_EQ(run({"check", "ky", "--catalog", "taub-nut", "--target", "missing"}).code, cli::kInputError);
  EXPECT_EQ(run({"check"}).code, cli::kInputError);
  EXPECT_EQ(run({"check", "ky", "--manifold", "/nonexistent/file.json"}).code, cli::kInputError);
  fs::path bad = write_file("bad.json", "{ not json");
  EXPECT_EQ(run({"check", "ky", "--manifold", bad.string(), "--target", "x"}).code, cli::kInputError);
  fs::path asym = write_file("asym.json", R"({"name":"a","dimension":2,"coordinates":["x","y"],
    "domain":{"x":[0,1],"y":[0,1]},"signature":[1,1],"metric":[["1","x"],["0","1"]]})");
  auto r = run({"check", "sk", "--manifold", asym.string(), "--target", "g"});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_FALSE(r.err.empty());
  fs::path unbound = write_file("unbound.json", R"({"name":"a","dimension":2,"coordinates":["x","y"],
    "domain":{"x":[0,1],"y":[0,1]},"signature":[1,1],"metric":[["k","0"],["0","1"]]})");
  EXPECT_EQ(run({"check", "sk", "--manifold", unbound.string(), "--target", "g"}).code, cli::kInputError);
}

TEST(ExitCodes, EvaluationFailureInsideACheckIsThree) {
  fs::path p = write_file("log.json", R"j({"name":"l","dimension":2,"coordinates":["x","y"],
    "domain":{"x":[-2,-1],"y":[0,1]},"signature":[1,1],"metric":[["1","0"],["0","1"]],
    "vectors":{"v":["log(x)","0"]}})j");
  auto r = run({"check", "killing-vector", "--manifold", p.string(), "--target", "v"});
  EXPECT_EQ(r.code, cli::kInternalError);
  EXPECT_NE(r.err.find("internal error"), std::string::npos);
}

TEST(ExitCodes, HelpIsZero) { EXPECT_EQ(run({"--help"}).code, cli::kOk); }

TEST(Output, ByteIdenticalAcrossRuns) {
  std::vector<std::string> args{"check", "ky", "--catalog", "taub-nut", "--seed", "7", "--threads", "4"};
  auto a = run(args), b = run(args);
  EXPECT_EQ(a.out, b.out);
  args.back() = "1";
  EXPECT_EQ(run(args).out, a.out);
  EXPECT_EQ(a.lines().size(), 4u);
}

TEST(Output, PrettyIsNotJson) {
  auto r = run({"check", "ky", "--catalog", "taub-nut", "--target", "fY", "--pretty"});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.out.find("pass"), std::string::npos);
  EXPECT_NE(r.out.front(), '{');
}

TEST(Output, SeedAndPointsAreHonoured) {
  auto r = run({"check", "ky", "--catalog", "taub-nut", "--target", "f1", "--points", "5", "--seed", "3"});
  auto v = r.lines();
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0]["points"], 5);
  EXPECT_EQ(v[0]["seed"], 3);
}

TEST(RoundTrip, ExportIngestRecheck) {
  for (const auto& name : catalog_names()) {
    fs::path file = temp_dir() / (name + ".json");
    ASSERT_EQ(run({"catalog", "export", "--catalog", name, "-o", file.string()}).code, cli::kOk) << name;
    for (const auto& kind : kKinds) {
      auto a = run({"check", kind, "--catalog", name});
      auto b = run({"check", kind, "--manifold", file.string()});
      EXPECT_EQ(a.code, b.code) << name << " " << kind;
      auto la = a.lines(), lb = b.lines();
      ASSERT_EQ(la.size(), lb.size()) << name << " " << kind;
      for (std::size_t k = 0; k < la.size(); ++k) {
        EXPECT_EQ(la[k]["target"], lb[k]["target"]);
        EXPECT_EQ(la[k]["pass"], lb[k]["pass"]) << name << " " << kind << " " << la[k]["target"];
      }
    }
  }
}

TEST(RoundTrip, EntryJsonIsStable) {
  auto e = taub_nut(1.0);
  json a = cli::entry_to_json(e);
  json b = cli::entry_to_json(cli::entry_from_json(a, {}));
  EXPECT_EQ(a, b);
}

TEST(RoundTrip, ParameterOverride) {
  fs::path file = temp_dir() / "tn.json";
  ASSERT_EQ(run({"catalog", "export", "--catalog", "taub-nut", "-o", file.string()}).code, cli::kOk);
  auto r = run({"check", "ky", "--manifold", file.string(), "--target", "fY", "--param", "m=2"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
}

TEST(Subcommands, SpinSasakiGeodesic) {
  EXPECT_EQ(run({"spin", "square", "--catalog", "taub-nut", "--target", "fY", "--points", "5"}).code, cli::kOk);
  EXPECT_EQ(run({"sasaki", "verify", "--catalog", "pseudo-sphere"}).code, cli::kOk);
  auto g = run({"geodesic", "run", "--catalog", "flat2", "--x", "0,0", "--v", "0.1,0.2", "--t1", "1"});
  EXPECT_EQ(g.code, cli::kOk) << g.err;
  EXPECT_FALSE(g.lines().empty());
  auto c = run({"catalog", "list"});
  EXPECT_EQ(c.lines().at(0)["catalog"].size(), catalog_names().size());
}

#ifdef HIDSYM_TOOL
TEST(Binary, ProcessExitCodes) {
  std::string tool = HIDSYM_TOOL;
  auto sh = [&](const std::string& args) {
    int s = std::system((tool + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(sh("check ky --catalog taub-nut --target fY"), 0);
  EXPECT_EQ(sh("check ky --catalog taub-nut --target fY --tol 1e-30"), 1);
  EXPECT_EQ(sh("check ky --catalog nowhere"), 2);
}
#endif
