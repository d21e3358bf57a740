#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hidsym/catalog.hpp"
#include "hidsym/manifold.hpp"
#include "hidsym/oracle.hpp"
#include "hidsym/simplify.hpp"

using namespace hidsym;

namespace {

using Vec = std::vector<double>;

double max_abs_of(const Vec& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Vec eval(const Manifold& m, const TensorField& t, const Vec& x) { return m.compile(t)(x); }

// Dense Gauss-Jordan inverse and determinant, for oracles only.
std::pair<Vec, double> inverse_det(Vec a, std::size_t n) {
  Vec inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
  double det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
    if (p != c) {
      det = -det;
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a[c * n + k], a[p * n + k]);
        std::swap(inv[c * n + k], inv[p * n + k]);
      }
    }
    double d = a[c * n + c];
    det *= d;
    for (std::size_t k = 0; k < n; ++k) {
      a[c * n + k] /= d;
      inv[c * n + k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r * n + c];
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return {inv, det};
}

Vec metric_values(const Manifold& m, const Vec& x) { return eval(m, m.metric_tensor(), x); }

}  // namespace

TEST(InverseMetric, EuclideanIsIdentity) {
  auto e = flat(3);
  const Matrix& inv = e.manifold.inverse_metric();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      ASSERT_TRUE(inv[i][j].is_const());
      EXPECT_EQ(inv[i][j].value(), Rational(i == j ? 1 : 0));
    }
}

TEST(InverseMetric, DiagonalInverse) {
  std::vector<std::string> c{"r", "theta", "phi"};
  std::set<std::string> C(c.begin(), c.end());
  auto P = [&](const char* s) { return parse(s, C); };
  Manifold m("diag", Chart(c, {{1, 2}, {0.5, 1}, {0, 1}}),
             {{P("f"), Expr(), Expr()}, {Expr(), P("f*r^2"), Expr()}, {Expr(), Expr(), P("f*r^2*sin(theta)^2")}},
             {{"f", 3.0}}, {1, 1, 1});
  const Matrix& inv = m.inverse_metric();
  EXPECT_TRUE(simplify(inv[0][0] - P("1/f")).is_zero());
  EXPECT_TRUE(simplify(inv[1][1] - P("1/(f*r^2)")).is_zero());
  EXPECT_TRUE(simplify(inv[2][2] - P("1/(f*r^2*sin(theta)^2)")).is_zero());
  EXPECT_TRUE(inv[0][1].is_zero());
}

TEST(InverseMetric, TaubNutAgainstNumericInverse) {
  auto e = taub_nut(1.0);
  const Manifold& M = e.manifold;
  Program ginv = M.compile(M.inverse_metric_tensor());
  for (const auto& x : sample_points(M.chart(), 20, 0)) {
    auto [num, det] = inverse_det(metric_values(M, x), 4);
    Vec sym = ginv(x);
    double scale = max_abs_of(num);
    for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(sym[k], num[k], 1e-10 * scale);
    EXPECT_GT(det, 0);
  }
}

TEST(Christoffel, FlatChartVanishes) {
  auto e = flat(3);
  for (const auto& c : e.manifold.christoffel()) EXPECT_TRUE(c.is_zero());
}

TEST(Christoffel, SphereValues) {
  auto M = sphere2().manifold;
  std::set<std::string> C{"theta", "phi"};
  EXPECT_TRUE(simplify(M.christoffel(0, 1, 1) - parse("-sin(theta)*cos(theta)", C)).is_zero());
  EXPECT_TRUE(simplify(M.christoffel(1, 0, 1) - parse("cos(theta)/sin(theta)", C)).is_zero());
  EXPECT_TRUE(M.christoffel(0, 0, 0).is_zero());
}

TEST(Christoffel, AgreesWithFiniteDifferences) {
  for (const auto& e : {taub_nut(1.0), sphere2(), pseudo_sphere_fixture(), flat(2, {1, -1})}) {
    auto r = christoffel_oracle_check(e.manifold);
    EXPECT_TRUE(r.pass) << e.name << " " << r.max_rel;
  }
}

TEST(Riemann, FlatAndFiniteDifference) {
  auto f = flat(3);
  for (const auto& c : f.manifold.riemann().components()) EXPECT_TRUE(c.is_zero());
  for (const auto& e : {taub_nut(1.0), sphere2(), pseudo_sphere_fixture(), flat(2)}) {
    auto r = riemann_oracle_check(e.manifold);
    EXPECT_TRUE(r.pass) << e.name << " " << r.max_rel;
  }
}

TEST(Ricci, SphereIsEinsteinWithConstantOne) {
  auto M = sphere2().manifold;
  const TensorField& ric = M.ricci();
  TensorField g = M.metric_tensor();
  for (std::size_t k = 0; k < ric.size(); ++k) EXPECT_TRUE(simplify(ric[k] - g[k]).is_zero()) << k;
  // Finite-difference oracle: contract fd_riemann at sampled points.
  for (const auto& x : sample_points(M.chart(), 5, 1)) {
    Vec R = fd_riemann(M, x);
    Vec gv = metric_values(M, x);
    for (std::size_t s = 0; s < 2; ++s)
      for (std::size_t nu = 0; nu < 2; ++nu) {
        double v = 0;
        for (std::size_t r = 0; r < 2; ++r) v += R[((r * 2 + s) * 2 + r) * 2 + nu];
        EXPECT_NEAR(v, gv[s * 2 + nu], 1e-6);
      }
  }
}

TEST(Ricci, PseudoSphereIsEinsteinWithConstantTwo) {
  auto M = pseudo_sphere_fixture().manifold;
  const TensorField& ric = M.ricci();
  TensorField g = M.metric_tensor();
  for (std::size_t k = 0; k < ric.size(); ++k) EXPECT_TRUE(simplify(ric[k] - 2 * g[k]).is_zero()) << k;
}

TEST(Ricci, TaubNutIsRicciFlat) {
  auto M = taub_nut(1.0).manifold;
  for (const auto& c : M.ricci().components()) EXPECT_TRUE(simplify(c).is_zero());
}

TEST(CovariantDerivative, MetricCompatibility) {
  for (const auto& e : {taub_nut(1.0), sphere2(), pseudo_sphere_fixture()}) {
    TensorField ng = covariant_derivative(e.manifold.metric_tensor(), e.manifold);
    for (const auto& x : sample_points(e.manifold.chart(), 5, 0))
      EXPECT_LT(max_abs_of(eval(e.manifold, ng, x)), 1e-12) << e.name;
  }
}

TEST(CovariantDerivative, TaubNutComplexStructuresAreParallel) {
  auto e = taub_nut(1.0);
  for (const char* f : {"f1", "f2", "f3"}) {
    TensorField nf = covariant_derivative(e.forms.at(f), e.manifold);
    for (const auto& x : sample_points(e.manifold.chart(), 20, 0)) {
      double scale = max_abs_of(eval(e.manifold, e.forms.at(f), x));
      EXPECT_LT(max_abs_of(eval(e.manifold, nf, x)), 1e-9 * scale) << f;
    }
  }
}

TEST(IndexGymnastics, KillingVectorDualRoundTrip) {
  auto e = taub_nut(1.0);
  const Manifold& M = e.manifold;
  const TensorField& X = e.vectors.at("dchi");
  TensorField low = lower_index(X, 0, M);
  TensorField back = raise_index(low, 0, M);
  for (const auto& x : sample_points(M.chart(), 20, 0)) {
    // Direct contraction oracle g_{mu nu} X^nu.
    Vec g = metric_values(M, x), xv = eval(M, X, x), lv = eval(M, low, x), bv = eval(M, back, x);
    for (std::size_t mu = 0; mu < 4; ++mu) {
      double s = 0;
      for (std::size_t nu = 0; nu < 4; ++nu) s += g[mu * 4 + nu] * xv[nu];
      EXPECT_NEAR(lv[mu], s, 1e-10);
      EXPECT_NEAR(bv[mu], xv[mu], 1e-10);
    }
  }
}

TEST(IndexGymnastics, LoweringInverseMetricGivesMetric) {
  auto M = taub_nut(1.0).manifold;
  TensorField t = lower_all(M.inverse_metric_tensor(), M);
  TensorField g = M.metric_tensor();
  for (const auto& x : sample_points(M.chart(), 5, 0)) {
    Vec a = eval(M, t, x), b = eval(M, g, x);
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10 * max_abs_of(b));
  }
}

TEST(ExteriorDerivative, SquaresToZero) {
  auto M = taub_nut(1.0).manifold;
  std::set<std::string> C{"r", "theta", "phi", "chi"};
  Expr s = parse("r^2*sin(theta)*cos(chi) + phi*theta", C);
  TensorField ds = exterior_derivative(TensorField::scalar(4, s), M.chart());
  TensorField dds = simplified(exterior_derivative(ds, M.chart()));
  for (const auto& c : dds.components()) EXPECT_TRUE(c.is_zero());
}

TEST(ExteriorDerivative, ConstantFormOnFlatSpace) {
  auto e = flat(3);
  TensorField a = TensorField::one_form({Expr(Rational(2)), Expr(Rational(-1)), Expr(Rational(5))});
  TensorField da = exterior_derivative(a, e.manifold.chart());
  for (const auto& c : da.components()) EXPECT_TRUE(c.is_zero());
}

TEST(ExteriorDerivative, PseudoSphereEtaMatchesPartialDerivativeOracle) {
  auto e = pseudo_sphere_fixture();
  const Manifold& M = e.manifold;
  for (const char* k : {"1", "2", "3"}) {
    const TensorField& eta = e.forms.at(std::string("eta") + k);
    const TensorField& deta = e.forms.at(std::string("deta") + k);
    Program pe = M.compile(eta), pd = M.compile(deta);
    for (const auto& x : sample_points(M.chart(), 5, 0)) {
      double h = 1e-5;
      std::vector<Vec> grad(3);
      for (std::size_t mu = 0; mu < 3; ++mu) {
        Vec xp = x, xm = x;
        xp[mu] += h;
        xm[mu] -= h;
        Vec a = pe(xp), b = pe(xm);
        grad[mu].resize(3);
        for (std::size_t nu = 0; nu < 3; ++nu) grad[mu][nu] = (a[nu] - b[nu]) / (2 * h);
      }
      Vec d = pd(x);
      for (std::size_t mu = 0; mu < 3; ++mu)
        for (std::size_t nu = 0; nu < 3; ++nu)
          EXPECT_NEAR(d[mu * 3 + nu], grad[mu][nu] - grad[nu][mu], 1e-7) << k;
    }
  }
}

TEST(Codifferential, ParallelFormIsCoclosed) {
  auto e = taub_nut(1.0);
  TensorField d = simplified(codifferential(e.forms.at("f1"), e.manifold));
  for (const auto& x : sample_points(e.manifold.chart(), 5, 0)) EXPECT_LT(max_abs_of(eval(e.manifold, d, x)), 1e-12);
}

TEST(Codifferential, FlatRotationFormIsCoclosed) {
  auto e = flat(2);
  std::set<std::string> C{"x1", "x2"};
  TensorField w = TensorField::one_form({parse("-x2", C), parse("x1", C)});
  TensorField dw = simplified(codifferential(w, e.manifold));
  for (const auto& c : dw.components()) EXPECT_TRUE(c.is_zero());
}

// Largest |d*f| over the sampled points, after comparing each component with
// -g_{nu l} |g|^{-1/2} d_mu (|g|^{1/2} f^{mu l}) evaluated numerically.
double codifferential_vs_divergence(const Manifold& M, const TensorField& f) {
  std::size_t n = M.dim();
  Program pf = M.compile(f), pdf = M.compile(codifferential(f, M));
  auto density = [&](const Vec& x) {
    auto [gi, det] = inverse_det(metric_values(M, x), n);
    Vec fv = pf(x), out(n * n, 0.0);
    double s = std::sqrt(std::abs(det));
    for (std::size_t mu = 0; mu < n; ++mu)
      for (std::size_t l = 0; l < n; ++l)
        for (std::size_t a = 0; a < n; ++a)
          for (std::size_t b = 0; b < n; ++b) out[mu * n + l] += s * gi[mu * n + a] * gi[l * n + b] * fv[a * n + b];
    return std::pair{out, s};
  };
  double largest = 0;
  for (const auto& x : sample_points(M.chart(), 5, 0)) {
    double h = 1e-4;
    Vec div(n, 0.0);
    for (std::size_t mu = 0; mu < n; ++mu) {
      auto at = [&](double k) {
        Vec y = x;
        y[mu] += k * h;
        return density(y).first;
      };
      Vec p1 = at(1), m1 = at(-1), p2 = at(2), m2 = at(-2);
      for (std::size_t l = 0; l < n; ++l)
        div[l] += (8 * (p1[mu * n + l] - m1[mu * n + l]) - (p2[mu * n + l] - m2[mu * n + l])) / (12 * h);
    }
    double s = density(x).second;
    Vec g = metric_values(M, x), sym = pdf(x);
    for (std::size_t nu = 0; nu < n; ++nu) {
      double v = 0;
      for (std::size_t l = 0; l < n; ++l) v -= g[nu * n + l] * div[l] / s;
      EXPECT_NEAR(sym[nu], v, 1e-8 * std::max(1.0, std::abs(v)));
    }
    largest = std::max(largest, max_abs_of(sym));
  }
  return largest;
}

TEST(Codifferential, TaubNutFYIsCoclosed) {
  // A K-Y form is co-closed: the trace of a totally antisymmetric nabla f vanishes.
  auto e = taub_nut(1.0);
  EXPECT_LT(codifferential_vs_divergence(e.manifold, e.forms.at("fY")), 1e-12);
}

TEST(Codifferential, NonCoclosedFormMatchesDivergenceOracle) {
  auto e = taub_nut(1.0);
  TensorField f = e.forms.at("fY").map([](const Expr& c) { return parse("r", {"r"}) * c; });
  EXPECT_GT(codifferential_vs_divergence(e.manifold, f), 1e-2);
}

TEST(LieBracket, RotationsCloseOnSu2) {
  auto e = taub_nut(1.0);
  const auto& C = e.manifold.chart();
  const char* R[] = {"R1", "R2", "R3"};
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    TensorField b = lie_bracket(e.vectors.at(R[i]), e.vectors.at(R[j]), C);
    for (std::size_t mu = 0; mu < 4; ++mu) EXPECT_TRUE(simplify(b[mu] - e.vectors.at(R[k])[mu]).is_zero());
    TensorField z = lie_bracket(e.vectors.at("dchi"), e.vectors.at(R[i]), C);
    for (const auto& c : z.components()) EXPECT_TRUE(simplify(c).is_zero());
  }
}

TEST(SamplePoints, Deterministic) {
  Chart c = taub_nut(1.0).manifold.chart();
  EXPECT_EQ(sample_points(c, 1, 42), sample_points(c, 1, 42));
  EXPECT_NE(sample_points(c, 5, 1), sample_points(c, 5, 2));
}

TEST(SamplePoints, RespectTaubNutBox) {
  Chart c = taub_nut(1.0).manifold.chart();
  EXPECT_DOUBLE_EQ(c.box()[0].lo, 0.5);
  EXPECT_DOUBLE_EQ(c.box()[0].hi, 10.0);
  EXPECT_DOUBLE_EQ(c.box()[1].lo, 0.2);
  EXPECT_DOUBLE_EQ(c.box()[1].hi, std::numbers::pi - 0.2);
  for (const auto& x : sample_points(c, 200, 3)) EXPECT_TRUE(c.contains(x));
}

TEST(ValidateMetric, SignatureMismatchThrows) {
  auto e = flat(2);
  Manifold bad("bad", e.manifold.chart(), e.manifold.metric(), {}, {1, -1});
  EXPECT_THROW(validate_metric(bad), GeometryError);
  EXPECT_NO_THROW(validate_metric(e.manifold));
  EXPECT_NO_THROW(validate_metric(taub_nut(1.0).manifold));
  EXPECT_NO_THROW(validate_metric(pseudo_sphere_fixture().manifold));
}
