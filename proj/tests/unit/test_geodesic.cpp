#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hidsym/catalog.hpp"
#include "hidsym/geodesic.hpp"

using namespace hidsym;

namespace {

constexpr double kPi = std::numbers::pi;

// Reference trajectory dipping to r ~ 0.9, chosen by a seeded search so that
// RK4 truncation error is visible above round-off.
GeodesicState taub_nut_start() {
  return {0, {{"r", 1.25}, {"theta", 2.55}, {"phi", 1.0}, {"chi", 1.0}},
          {{"r", -0.5}, {"theta", 0.45}, {"phi", -0.5}, {"chi", -0.05}}};
}

IntegratorConfig taub_nut_config(double step) {
  IntegratorConfig cfg;
  cfg.step = step;
  cfg.periodic = {{"phi", 2 * kPi}, {"chi", 4 * kPi}};
  return cfg;
}

double wrap(double a, double lo, double period) {
  double r = std::fmod(a - lo, period);
  return (r < 0 ? r + period : r) + lo;
}

}  // namespace

TEST(Integrate, FlatStraightLine) {
  auto e = flat(3);
  GeodesicState s{0, {{"x1", -1.0}, {"x2", 0.5}, {"x3", 0.2}}, {{"x1", 0.3}, {"x2", -0.1}, {"x3", 0.05}}};
  IntegratorConfig cfg;
  cfg.t1 = 5;
  auto tr = integrate(e.manifold, s, cfg);
  ASSERT_TRUE(tr.complete());
  for (const auto& st : tr.states)
    for (const auto& c : {"x1", "x2", "x3"}) {
      EXPECT_NEAR(st.position.at(c), s.position.at(c) + s.velocity.at(c) * st.t, 1e-12);
      EXPECT_NEAR(st.velocity.at(c), s.velocity.at(c), 1e-14);
    }
}

TEST(Integrate, SphereGreatCircleClosesAfterTwoPi) {
  auto e = sphere2();
  // Unit-speed great circle through (theta, phi) = (pi/2, 1), tilted by 0.6.
  GeodesicState s{0, {{"theta", kPi / 2}, {"phi", 1.0}}, {{"theta", 0.6}, {"phi", 0.8}}};
  IntegratorConfig cfg;
  cfg.t1 = 2 * kPi;
  cfg.periodic = {{"phi", 2 * kPi}};
  auto tr = integrate(e.manifold, s, cfg);
  ASSERT_TRUE(tr.complete());
  const auto& end = tr.states.back();
  EXPECT_NEAR(end.t, 2 * kPi, 1e-12);
  EXPECT_NEAR(end.position.at("theta"), kPi / 2, 1e-6);
  EXPECT_NEAR(wrap(end.position.at("phi"), 0.1, 2 * kPi), 1.0, 1e-6);
  // Closed form: x(t) = cos t p + sin t u on the unit sphere.
  double p[3] = {std::cos(1.0), std::sin(1.0), 0.0};
  double u[3] = {-0.8 * std::sin(1.0), 0.8 * std::cos(1.0), -0.6};
  for (std::size_t k = 0; k < tr.states.size(); k += 500) {
    const auto& st = tr.states[k];
    double x[3];
    for (int i = 0; i < 3; ++i) x[i] = std::cos(st.t) * p[i] + std::sin(st.t) * u[i];
    double th = std::acos(x[2]);
    double ph = std::atan2(x[1], x[0]);
    EXPECT_NEAR(st.position.at("theta"), th, 1e-6);
    EXPECT_NEAR(wrap(st.position.at("phi") - ph, -kPi, 2 * kPi), 0.0, 1e-6);
  }
}

TEST(Integrate, LeavingTheBoxStopsEarly) {
  auto e = flat(2);
  GeodesicState s{0, {{"x1", 0.0}, {"x2", 0.0}}, {{"x1", 1.0}, {"x2", 0.0}}};
  auto tr = integrate(e.manifold, s, {});
  EXPECT_EQ(tr.status, TrajectoryStatus::DomainExit);
  EXPECT_FALSE(tr.complete());
  EXPECT_LE(tr.states.back().position.at("x1"), 2.0);
  EXPECT_GT(tr.states.back().t, 1.9);
}

TEST(Integrate, RejectsBadInput) {
  auto e = flat(2);
  GeodesicState out{0, {{"x1", 5.0}, {"x2", 0.0}}, {{"x1", 1.0}, {"x2", 0.0}}};
  EXPECT_THROW(integrate(e.manifold, out, {}), GeometryError);
  GeodesicState ok{0, {{"x1", 0.0}, {"x2", 0.0}}, {{"x1", 0.1}, {"x2", 0.0}}};
  IntegratorConfig bad;
  bad.step = -1;
  EXPECT_THROW(integrate(e.manifold, ok, bad), GeometryError);
}

TEST(Integrate, ParallelRunsMatchSerial) {
  auto e = taub_nut(1.0);
  std::vector<GeodesicState> starts;
  for (int k = 0; k < 4; ++k) {
    auto s = taub_nut_start();
    s.velocity["theta"] += 0.01 * k;
    starts.push_back(s);
  }
  auto cfg = taub_nut_config(1e-2);
  cfg.t1 = 2;
  auto many = integrate_many(e.manifold, starts, cfg, 3);
  ASSERT_EQ(many.size(), starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    auto one = integrate(e.manifold, starts[k], cfg);
    EXPECT_EQ(one.states.back().position, many[k].states.back().position);
  }
}

TEST(TaubNutOrbit, StaysInChartAndConservesInvariants) {
  auto e = taub_nut(1.0);
  const auto& M = e.manifold;
  auto tr = integrate(M, taub_nut_start(), taub_nut_config(1e-3));
  ASSERT_TRUE(tr.complete());
  double rmin = 1e9, rmax = 0;
  for (const auto& s : tr.states) {
    rmin = std::min(rmin, s.position.at("r"));
    rmax = std::max(rmax, s.position.at("r"));
  }
  EXPECT_NEAR(rmin, 0.900, 1e-3);
  EXPECT_NEAR(rmax, 9.708, 1e-3);

  auto energy = monitor_invariant(tr, Invariant("energy", M.metric_tensor(), M), M, 1e-8);
  EXPECT_TRUE(energy.pass);
  EXPECT_NEAR(energy.initial, 3.39676, 1e-5);
  EXPECT_LT(energy.relative_drift, 1e-8);

  auto ky = monitor_invariant(tr, Invariant("K_Y", e.tensors.at("K_Y"), M), M, 1e-6);
  EXPECT_TRUE(ky.pass);
  EXPECT_NEAR(ky.initial, 6.41413, 1e-5);
  EXPECT_LT(ky.relative_drift, 1e-6);

  auto q = monitor_invariant(tr, Invariant("dchi", e.vectors.at("dchi"), M), M, 1e-8);
  EXPECT_TRUE(q.pass);
}

TEST(TaubNutOrbit, HalvingTheStepImprovesEnergyDrift) {
  auto e = taub_nut(1.0);
  const auto& M = e.manifold;
  Invariant energy("energy", M.metric_tensor(), M);
  auto coarse = monitor_invariant(integrate(M, taub_nut_start(), taub_nut_config(1e-3)), energy, M);
  auto fine = monitor_invariant(integrate(M, taub_nut_start(), taub_nut_config(5e-4)), energy, M);
  // Frozen: 1.518e-12 and 9.936e-14.
  EXPECT_NEAR(coarse.relative_drift, 1.518e-12, 0.05e-12);
  EXPECT_NEAR(fine.relative_drift, 9.936e-14, 0.5e-14);
  EXPECT_GE(coarse.relative_drift / fine.relative_drift, 8.0);
}

TEST(TaubNutOrbit, AdaptiveIntegrator) {
  auto e = taub_nut(1.0);
  const auto& M = e.manifold;
  auto cfg = taub_nut_config(1e-2);
  cfg.method = Method::RK45;
  auto tr = integrate(M, taub_nut_start(), cfg);
  ASSERT_TRUE(tr.complete());
  EXPECT_EQ(tr.steps, 208u);
  auto energy = monitor_invariant(tr, Invariant("energy", M.metric_tensor(), M), M);
  EXPECT_LT(energy.relative_drift, 1e-9);
  EXPECT_NEAR(tr.states.back().t, 10.0, 1e-12);
}

TEST(Invariants, NonConservedControlDrifts) {
  auto e = flat(3);
  const auto& M = e.manifold;
  GeodesicState s{0, {{"x1", -1.5}, {"x2", 0.0}, {"x3", 0.0}}, {{"x1", 0.3}, {"x2", 0.1}, {"x3", -0.1}}};
  auto tr = integrate(M, s, {});
  ASSERT_TRUE(tr.complete());
  auto c = monitor_invariant(tr, Invariant("x1_delta", e.tensors.at("x1_delta"), M), M, 1e-8);
  EXPECT_FALSE(c.pass);
  // Q(t) = x1(t) |v|^2, so the drift is 3 * 0.11 = 0.33.
  EXPECT_NEAR(c.max_abs_drift, 0.33, 1e-10);
  auto g = monitor_invariant(tr, Invariant("energy", M.metric_tensor(), M), M, 1e-8);
  EXPECT_TRUE(g.pass);
}

TEST(Invariants, VectorAndTensorEvaluation) {
  auto e = taub_nut(1.0);
  const auto& M = e.manifold;
  Invariant q("dchi", e.vectors.at("dchi"), M);
  EXPECT_EQ(q.rank(), 1u);
  std::vector<double> x{2.0, 1.0, 0.5, 0.5}, v{0.0, 0.0, 0.0, 1.0};
  // g_{chi chi} = 16 m^2 / V with V = 1 + 4m/r = 3.
  EXPECT_NEAR(q(x, v), 16.0 / 3.0, 1e-12);
  EXPECT_THROW(Invariant("fY", e.forms.at("fY"), M), GeometryError);
}

TEST(Csv, HeaderAndRows) {
  auto e = flat(2);
  GeodesicState s{0, {{"x1", 0.0}, {"x2", 0.0}}, {{"x1", 0.1}, {"x2", 0.2}}};
  IntegratorConfig cfg;
  cfg.t1 = 1;
  cfg.step = 0.25;
  auto tr = integrate(e.manifold, s, cfg);
  std::vector<Invariant> inv{Invariant("energy", e.manifold.metric_tensor(), e.manifold)};
  std::ostringstream os;
  write_csv(os, tr, e.manifold, inv);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,x1,x2,dx1,dx2,energy");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 5);
}
