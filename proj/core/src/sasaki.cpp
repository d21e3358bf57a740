#include "hidsym/sasaki.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "hidsym/simplify.hpp"

namespace hidsym {

namespace {

constexpr std::array<std::array<int, 3>, 3> kEven{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};

// Residual expressions with the magnitudes that set their scale.
struct Collector {
  std::vector<Expr> res;
  std::vector<Expr> scale;
  void add(const Expr& r, std::initializer_list<Expr> terms) {
    res.push_back(r);
    for (const auto& t : terms)
      if (!t.is_zero()) scale.push_back(t);
  }
  ResidualReport run(std::string name, const Manifold& m, const CheckOptions& opt) const {
    return sampled_residual(std::move(name), m, res, scale, opt);
  }
};

Expr sum_of(std::vector<Expr> terms) { return make_sum(std::move(terms)); }

// (AB)^i_j for (1,1) tensors.
Expr compose(const TensorField& a, const TensorField& b, std::size_t i, std::size_t j) {
  std::vector<Expr> t;
  for (std::size_t k = 0; k < a.dim(); ++k) {
    const Expr& x = a.at({i, k});
    const Expr& y = b.at({k, j});
    if (!x.is_zero() && !y.is_zero()) t.push_back(x * y);
  }
  return sum_of(std::move(t));
}

// (A v)^i.
Expr apply(const TensorField& a, const TensorField& v, std::size_t i) {
  std::vector<Expr> t;
  for (std::size_t k = 0; k < a.dim(); ++k)
    if (!a.at({i, k}).is_zero() && !v[k].is_zero()) t.push_back(a.at({i, k}) * v[k]);
  return sum_of(std::move(t));
}

// omega(A e_j) for a 1-form omega.
Expr pull(const TensorField& w, const TensorField& a, std::size_t j) {
  std::vector<Expr> t;
  for (std::size_t k = 0; k < a.dim(); ++k)
    if (!w[k].is_zero() && !a.at({k, j}).is_zero()) t.push_back(w[k] * a.at({k, j}));
  return sum_of(std::move(t));
}

Expr pair(const TensorField& w, const TensorField& v) {
  std::vector<Expr> t;
  for (std::size_t k = 0; k < v.dim(); ++k)
    if (!w[k].is_zero() && !v[k].is_zero()) t.push_back(w[k] * v[k]);
  return sum_of(std::move(t));
}

Expr gdot(const Manifold& m, const TensorField& x, const TensorField& y) {
  std::vector<Expr> t;
  const Matrix& g = m.metric();
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j)
      if (!g[i][j].is_zero() && !x[i].is_zero() && !y[j].is_zero()) t.push_back(g[i][j] * x[i] * y[j]);
  return sum_of(std::move(t));
}

Expr delta(std::size_t i, std::size_t j) { return i == j ? Expr(1) : Expr(); }

void validate_structure(const Manifold& m, const MixedThreeStructure& s) {
  std::size_t n = m.dim();
  if (n < 3 || (n - 3) % 4 != 0) throw GeometryError("mixed 3-structure needs dimension 4n+3");
  std::size_t nn = (n - 3) / 4;
  std::size_t positive = 0;
  for (int v : m.signature()) positive += v > 0;
  if (positive != 2 * nn + 1) throw GeometryError("mixed 3-structure needs signature (2n+1, 2n+2)");
  for (int a = 0; a < 3; ++a) {
    const auto& phi = s.phi[a];
    if (phi.dim() != n || phi.rank() != 2 || phi.variance(0) != Variance::Up || phi.variance(1) != Variance::Down)
      throw GeometryError("phi must be a (1,1) tensor on the chart");
    if (s.xi[a].dim() != n || s.xi[a].rank() != 1 || s.xi[a].variance(0) != Variance::Up)
      throw GeometryError("xi must be a vector field on the chart");
    if (s.eta[a].dim() != n || s.eta[a].rank() != 1 || s.eta[a].variance(0) != Variance::Down)
      throw GeometryError("eta must be a 1-form on the chart");
  }
}

ResidualReport with_name(ResidualReport r, std::string name) {
  r.check = std::move(name);
  return r;
}

std::vector<std::vector<double>> candidate_directions(std::size_t n, std::mt19937_64& rng, std::size_t random_count) {
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    out.push_back(e);
  }
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t r = 0; r < random_count; ++r) {
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    out.push_back(v);
  }
  return out;
}

}  // namespace

ResidualReport structure_identity_suite(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt) {
  validate_structure(m, s);
  std::size_t n = m.dim();
  const Matrix& g = m.metric();
  Collector almost, cross, compat;
  for (int a = 0; a < 3; ++a) {
    const auto &phi = s.phi[a], &xi = s.xi[a], &eta = s.eta[a];
    Expr e(s.eps[a]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Expr sq = compose(phi, phi, i, j);
        Expr xe = xi[i] * eta[j];
        almost.add(sq + e * delta(i, j) - xe, {sq, delta(i, j), xe});
      }
    Expr ex = pair(eta, xi);
    almost.add(ex - e, {ex, e});
    for (int b = 0; b < 3; ++b)
      if (a != b) {
        Expr v = pair(eta, s.xi[b]);
        cross.res.push_back(v);
        for (std::size_t k = 0; k < n; ++k)
          for (const Expr* e : {&eta[k], &s.xi[b][k]})
            if (!e->is_zero()) cross.scale.push_back(*e);
      }
  }
  for (const auto& [a, b, c] : kEven) {
    Expr ec(s.eps[c]);
    const auto &pa = s.phi[a], &pb = s.phi[b], &pc = s.phi[c];
    for (std::size_t i = 0; i < n; ++i) {
      Expr u = apply(pa, s.xi[b], i), v = apply(pb, s.xi[a], i), w = ec * s.xi[c][i];
      cross.add(u - w, {u, w});
      cross.add(v + w, {v, w});
      Expr p = pull(s.eta[a], pb, i), q = pull(s.eta[b], pa, i), r = ec * s.eta[c][i];
      cross.add(p - r, {p, r});
      cross.add(q + r, {q, r});
      for (std::size_t j = 0; j < n; ++j) {
        Expr ab = compose(pa, pb, i, j), ba = compose(pb, pa, i, j);
        Expr xa = s.xi[a][i] * s.eta[b][j], xb = s.xi[b][i] * s.eta[a][j];
        Expr pg = ec * pc.at({i, j});
        cross.add(ab - xa - pg, {ab, xa, pg});
        cross.add(-ba + xb - pg, {ba, xb, pg});
      }
    }
  }
  for (int a = 0; a < 3; ++a) {
    const auto &phi = s.phi[a], &xi = s.xi[a], &eta = s.eta[a];
    Expr e(s.eps[a]);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        std::vector<Expr> t;
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l)
            if (!phi.at({k, i}).is_zero() && !phi.at({l, j}).is_zero() && !g[k][l].is_zero())
              t.push_back(g[k][l] * phi.at({k, i}) * phi.at({l, j}));
        Expr lhs = sum_of(std::move(t));
        Expr ee = eta[i] * eta[j];
        compat.add(lhs - e * g[i][j] + ee, {lhs, g[i][j], ee});
      }
      std::vector<Expr> t;
      for (std::size_t k = 0; k < n; ++k)
        if (!g[i][k].is_zero() && !xi[k].is_zero()) t.push_back(g[i][k] * xi[k]);
      Expr gx = sum_of(std::move(t));
      compat.add(gx - eta[i], {gx, eta[i]});
    }
  }
  std::vector<ResidualReport> parts{almost.run("almost-structure", m, opt), cross.run("cross-relations", m, opt),
                                    compat.run("compatibility", m, opt)};
  return merge_reports("structure-identities", parts);
}

ResidualReport sasakian_residuals(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt) {
  validate_structure(m, s);
  std::size_t n = m.dim();
  const Matrix& g = m.metric();
  std::array<Collector, 3> literal;
  Collector uniform, subcase;
  for (int a = 0; a < 3; ++a) {
    const auto &phi = s.phi[a], &xi = s.xi[a], &eta = s.eta[a];
    TensorField dphi = covariant_derivative(phi, m);  // [X][i][Y]
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t y = 0; y < n; ++y) {
          const Expr& lhs = dphi.at({x, i, y});
          Expr gx = g[x][y] * xi[i];
          Expr ex = eta[y] * delta(i, x);
          if (a == 0) {
            literal[a].add(lhs - (gx - ex), {lhs, gx, ex});
          } else {
            std::vector<Expr> t;
            for (std::size_t k = 0; k < n; ++k)
              for (std::size_t l = 0; l < n; ++l)
                if (!g[k][l].is_zero() && !phi.at({k, x}).is_zero() && !phi.at({l, y}).is_zero())
                  t.push_back(g[k][l] * phi.at({k, x}) * phi.at({l, y}));
            Expr gpp = sum_of(std::move(t)) * xi[i];
            Expr ep = eta[y] * compose(phi, phi, i, x);
            literal[a].add(lhs - gpp - ep, {lhs, gpp, ep});
          }
          uniform.add(lhs - ex + gx, {lhs, gx, ex});
        }
        if (a > 0) {
          // Y = xi_a in the LP-Sasakian condition: (nabla_X phi_a) xi_a = eta_a(xi_a) phi_a^2 X.
          std::vector<Expr> t;
          for (std::size_t y = 0; y < n; ++y)
            if (!dphi.at({x, i, y}).is_zero() && !xi[y].is_zero()) t.push_back(dphi.at({x, i, y}) * xi[y]);
          Expr lhs = sum_of(std::move(t));
          Expr rhs = Expr(s.eps[a]) * compose(phi, phi, i, x);
          subcase.add(lhs - rhs, {lhs, rhs});
        }
      }
  }
  std::vector<ResidualReport> parts{literal[0].run("sasakian-1", m, opt), literal[1].run("lp-sasakian-2", m, opt),
                                    literal[2].run("lp-sasakian-3", m, opt), subcase.run("lp-xi-subcase", m, opt)};
  ResidualReport r = merge_reports("sasakian", parts);
  ResidualReport u = uniform.run("uniform-variant", m, opt);
  r.extra["uniform_variant.max_relative_residual"] = u.max_rel;
  r.extra["uniform_variant.pass"] = u.pass ? 1.0 : 0.0;
  return r;
}

ResidualReport killing_triple_check(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt) {
  validate_structure(m, s);
  std::size_t n = m.dim();
  std::vector<ResidualReport> parts;
  for (int a = 0; a < 3; ++a)
    parts.push_back(with_name(killing_vector_residual(s.xi[a], m, opt), "killing-xi" + std::to_string(a + 1)));
  Collector orth, causal, bracket, phinab, phinab_uniform;
  for (int a = 0; a < 3; ++a) {
    Expr nn = gdot(m, s.xi[a], s.xi[a]);
    causal.add(nn - Expr(s.eps[a]), {nn, Expr(1)});
    for (int b = a + 1; b < 3; ++b) {
      Expr v = gdot(m, s.xi[a], s.xi[b]);
      orth.add(v, {v, nn});
    }
    TensorField dxi = covariant_derivative(s.xi[a], m);  // [j][i]
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Expr& p = s.phi[a].at({i, j});
        const Expr& d = dxi.at({j, i});
        phinab.add(p + Expr(s.eps[a]) * d, {p, d});
        phinab_uniform.add(p - d, {p, d});
      }
  }
  for (const auto& [a, b, c] : kEven) {
    TensorField br = lie_bracket(s.xi[a], s.xi[b], m.chart());
    for (std::size_t i = 0; i < n; ++i) {
      Expr rhs = Expr(-2 * s.eps[c]) * s.xi[c][i];
      bracket.add(br[i] - rhs, {br[i], rhs});
    }
  }
  parts.push_back(orth.run("orthogonality", m, opt));
  parts.push_back(causal.run("causal-character", m, opt));
  parts.push_back(bracket.run("brackets", m, opt));
  parts.push_back(phinab.run("phi-nabla-xi", m, opt));
  ResidualReport r = merge_reports("killing-triple", parts);
  ResidualReport u = phinab_uniform.run("phi-nabla-xi-uniform", m, opt);
  r.extra["phi_equals_nabla_xi.max_relative_residual"] = u.max_rel;
  r.extra["phi_equals_nabla_xi.pass"] = u.pass ? 1.0 : 0.0;
  return r;
}

ResidualReport curvature_characterization(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt) {
  validate_structure(m, s);
  std::size_t n = m.dim();
  const Matrix& g = m.metric();
  const TensorField& R = m.riemann();
  Collector c;
  for (int a = 0; a < 3; ++a) {
    const auto &xi = s.xi[a], &eta = s.eta[a];
    for (std::size_t rho = 0; rho < n; ++rho)
      for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) {
          std::vector<Expr> t;
          for (std::size_t v = 0; v < n; ++v)
            if (!R.at({rho, y, x, v}).is_zero() && !xi[v].is_zero()) t.push_back(R.at({rho, y, x, v}) * xi[v]);
          Expr lhs = sum_of(std::move(t));
          Expr p = eta[y] * delta(rho, x), q = g[x][y] * xi[rho];
          c.add(lhs - p + q, {lhs, p, q});
        }
  }
  return c.run("curvature-characterization", m, opt);
}

ResidualReport sectional_curvature_check(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt,
                                         double degenerate_guard) {
  validate_structure(m, s);
  std::size_t n = m.dim();
  std::vector<Expr> exprs = m.riemann().components();
  for (const auto& row : m.metric()) exprs.insert(exprs.end(), row.begin(), row.end());
  for (int a = 0; a < 3; ++a) exprs.insert(exprs.end(), s.xi[a].components().begin(), s.xi[a].components().end());
  Program prog = m.compile(exprs);
  std::size_t n4 = n * n * n * n;
  std::mt19937_64 rng(opt.seed ^ 0x5eedu);
  ResidualAccumulator acc("sectional-curvature", opt.tol);
  std::size_t planes = 0, skipped = 0;
  for (const auto& pt : sample_points(m.chart(), opt.points, opt.seed)) {
    auto v = prog(pt);
    auto R = [&](std::size_t r, std::size_t sg, std::size_t mu, std::size_t nu) {
      return v[((r * n + sg) * n + mu) * n + nu];
    };
    auto G = [&](std::size_t i, std::size_t j) { return v[n4 + i * n + j]; };
    auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
      double t = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t += G(i, j) * x[i] * y[j];
      return t;
    };
    auto dirs = candidate_directions(n, rng, 3);
    double worst = 0.0;
    for (int a = 0; a < 3; ++a) {
      std::vector<double> xi(v.begin() + static_cast<std::ptrdiff_t>(n4 + n * n + a * n),
                             v.begin() + static_cast<std::ptrdiff_t>(n4 + n * n + (a + 1) * n));
      for (const auto& x : dirs) {
        ++planes;
        double den = dot(xi, xi) * dot(x, x) - dot(xi, x) * dot(xi, x);
        if (std::abs(den) <= degenerate_guard) {
          ++skipped;
          continue;
        }
        // g(R(xi, X) X, xi)
        std::vector<double> w(n, 0.0);
        for (std::size_t r = 0; r < n; ++r)
          for (std::size_t sg = 0; sg < n; ++sg)
            for (std::size_t mu = 0; mu < n; ++mu)
              for (std::size_t nu = 0; nu < n; ++nu) w[r] += R(r, sg, mu, nu) * x[sg] * xi[mu] * x[nu];
        double k = dot(w, xi) / den;
        worst = std::max(worst, std::abs(k - 1.0));
      }
    }
    acc.add(m.chart().to_point(pt), worst, 1.0);
  }
  ResidualReport r = acc.finish();
  r.extra["planes"] = static_cast<double>(planes);
  r.extra["skipped_degenerate_planes"] = static_cast<double>(skipped);
  if (skipped) r.notes.push_back(std::to_string(skipped) + " degenerate planes skipped");
  return r;
}

ResidualReport einstein_check(const Manifold& m, const Rational& l, const CheckOptions& opt) {
  const TensorField& ric = m.ricci();
  Collector c;
  std::size_t n = m.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      Expr lg = Expr(l) * m.metric()[i][j];
      c.add(ric.at({i, j}) - lg, {ric.at({i, j}), m.metric()[i][j]});
    }
  ResidualReport r = c.run("einstein", m, opt);
  r.extra["lambda"] = l.to_double();
  return r;
}

ConeManifold build_cone(const Manifold& m, const MixedThreeStructure& s, Interval r_range) {
  validate_structure(m, s);
  std::size_t n = m.dim();
  auto coords = m.chart().coordinates();
  if (m.chart().coordinate_set().count("r")) throw GeometryError("base chart already has a coordinate named r");
  auto box = m.chart().box();
  coords.push_back("r");
  box.push_back(r_range);
  Expr r = parse("r", {"r"});
  Matrix g(n + 1, std::vector<Expr>(n + 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i][j] = m.metric()[i][j].is_zero() ? Expr() : pow(r, Rational(2)) * m.metric()[i][j];
  g[n][n] = Expr(1);
  auto sig = m.signature();
  sig.push_back(1);
  Manifold cone(m.name() + "-cone", Chart(coords, box), g, m.params(), sig);
  std::array<TensorField, 3> J;
  for (int a = 0; a < 3; ++a) {
    TensorField t(n + 1, {Variance::Up, Variance::Down});
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) t.at({i, j}) = s.phi[a].at({i, j});
      t.at({i, n}) = s.xi[a][i] / r;
    }
    for (std::size_t j = 0; j < n; ++j) t.at({n, j}) = -(s.eta[a][j] * r);
    J[a] = simplified(t);
  }
  std::vector<Expr> eu(n + 1);
  eu[n] = r;
  return ConeManifold{std::move(cone), std::move(J), TensorField::vector(eu), s.eps};
}

ResidualReport para_hyperkahler_check(const ConeManifold& c, const CheckOptions& opt) {
  const Manifold& m = c.cone;
  std::size_t n = m.dim();
  const Matrix& g = m.metric();
  Collector prod, herm;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Expr> t;
      for (std::size_t k = 0; k < n; ++k) {
        Expr a = compose(c.J[0], c.J[1], i, k);
        if (!a.is_zero() && !c.J[2].at({k, j}).is_zero()) t.push_back(a * c.J[2].at({k, j}));
      }
      Expr p = sum_of(std::move(t));
      prod.add(p + delta(i, j), {p, Expr(1)});
    }
  for (int a = 0; a < 3; ++a) {
    const auto& J = c.J[a];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        std::vector<Expr> t;
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l)
            if (!g[k][l].is_zero() && !J.at({k, i}).is_zero() && !J.at({l, j}).is_zero())
              t.push_back(g[k][l] * J.at({k, i}) * J.at({l, j}));
        Expr lhs = sum_of(std::move(t));
        Expr rhs = Expr(c.eps[a]) * g[i][j];
        herm.add(lhs - rhs, {lhs, rhs});
      }
  }
  std::vector<ResidualReport> parts{prod.run("triple-product", m, opt), herm.run("hermitian", m, opt)};
  for (int a = 0; a < 3; ++a)
    parts.push_back(with_name(covariant_constancy_residual(c.J[a], m, opt), "parallel-J" + std::to_string(a + 1)));
  return merge_reports("para-hyperkahler", parts);
}

MixedThreeStructure reverse_cone(const ConeManifold& c, const Manifold& base) {
  std::size_t n = base.dim();
  if (c.cone.dim() != n + 1) throw GeometryError("cone and base dimensions do not match");
  std::map<std::string, Expr> at_one{{"r", Expr(1)}};
  MixedThreeStructure s;
  s.eps = c.eps;
  for (int a = 0; a < 3; ++a) {
    std::vector<Expr> xi(n);
    for (std::size_t i = 0; i < n; ++i) xi[i] = simplify(substitute(c.J[a].at({i, n}), at_one));
    s.xi[a] = TensorField::vector(xi);
    TensorField dxi = covariant_derivative(s.xi[a], base);
    TensorField phi(n, {Variance::Up, Variance::Down});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) phi.at({i, j}) = simplify(Expr(-c.eps[a]) * dxi.at({j, i}));
    s.phi[a] = phi;
    s.eta[a] = simplified(lower_index(s.xi[a], 0, base));
  }
  return s;
}

ResidualReport cone_round_trip(const ConeManifold& c, const Manifold& base, const MixedThreeStructure& original,
                               const CheckOptions& opt) {
  MixedThreeStructure back = reverse_cone(c, base);
  std::size_t n = base.dim();
  Collector xi, eta, phi, phi_uniform;
  for (int a = 0; a < 3; ++a) {
    TensorField dxi = covariant_derivative(back.xi[a], base);
    for (std::size_t i = 0; i < n; ++i) {
      xi.add(back.xi[a][i] - original.xi[a][i], {back.xi[a][i], original.xi[a][i]});
      eta.add(back.eta[a][i] - original.eta[a][i], {back.eta[a][i], original.eta[a][i]});
      for (std::size_t j = 0; j < n; ++j) {
        phi.add(back.phi[a].at({i, j}) - original.phi[a].at({i, j}), {back.phi[a].at({i, j}), original.phi[a].at({i, j})});
        phi_uniform.add(dxi.at({j, i}) - original.phi[a].at({i, j}), {dxi.at({j, i}), original.phi[a].at({i, j})});
      }
    }
  }
  std::vector<ResidualReport> parts{xi.run("xi", base, opt), eta.run("eta", base, opt), phi.run("phi", base, opt)};
  // Rebuilding the cone from the recovered data.
  Collector jj;
  ConeManifold again = build_cone(base, back, {c.cone.chart().box().back()});
  for (int a = 0; a < 3; ++a)
    for (std::size_t k = 0; k < again.J[a].size(); ++k) jj.add(again.J[a][k] - c.J[a][k], {again.J[a][k], c.J[a][k]});
  parts.push_back(jj.run("rebuilt-J", c.cone, opt));
  ResidualReport r = merge_reports("cone-round-trip", parts);
  ResidualReport u = phi_uniform.run("phi-uniform", base, opt);
  r.extra["phi_equals_nabla_xi.max_relative_residual"] = u.max_rel;
  r.extra["phi_equals_nabla_xi.pass"] = u.pass ? 1.0 : 0.0;
  std::size_t wrong = 0;
  for (int a = 0; a < 3; ++a) wrong += back.eps[a] != original.eps[a];
  r.extra["eps_mismatches"] = static_cast<double>(wrong);
  if (wrong) r.pass = false;
  return r;
}

WitnessReport phi_not_killing_witness(const Manifold& m, const MixedThreeStructure& s, const CheckOptions& opt,
                                      double threshold) {
  validate_structure(m, s);
  std::size_t n = m.dim();
  std::vector<Expr> exprs;
  for (const auto& row : m.metric()) exprs.insert(exprs.end(), row.begin(), row.end());
  std::array<std::size_t, 3> off_d{}, off_xi{}, off_phi{};
  for (int a = 0; a < 3; ++a) {
    off_d[a] = exprs.size();
    TensorField d = covariant_derivative(s.phi[a], m);
    exprs.insert(exprs.end(), d.components().begin(), d.components().end());
    off_xi[a] = exprs.size();
    exprs.insert(exprs.end(), s.xi[a].components().begin(), s.xi[a].components().end());
    off_phi[a] = exprs.size();
    exprs.insert(exprs.end(), s.phi[a].components().begin(), s.phi[a].components().end());
  }
  Program prog = m.compile(exprs);
  std::mt19937_64 rng(opt.seed ^ 0x77u);
  WitnessReport out;
  std::array<bool, 3> found{};
  std::array<double, 3> literal{}, corrected{};
  for (const auto& pt : sample_points(m.chart(), opt.points, opt.seed)) {
    auto v = prog(pt);
    auto G = [&](std::size_t i, std::size_t j) { return v[i * n + j]; };
    auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
      double t = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t += G(i, j) * x[i] * y[j];
      return t;
    };
    auto dirs = candidate_directions(n, rng, 2);
    for (int a = 0; a < 3; ++a) {
      if (found[a]) continue;
      std::vector<double> xi(v.begin() + static_cast<std::ptrdiff_t>(off_xi[a]),
                             v.begin() + static_cast<std::ptrdiff_t>(off_xi[a] + n));
      double xx = dot(xi, xi);
      for (auto x : dirs) {
        double c = dot(x, xi) / xx;
        for (std::size_t i = 0; i < n; ++i) x[i] -= c * xi[i];
        double gxx = dot(x, x);
        if (std::abs(gxx) <= threshold) continue;
        std::vector<double> val(n, 0.0), phx(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t mu = 0; mu < n; ++mu) {
            phx[i] += v[off_phi[a] + i * n + mu] * x[mu];
            for (std::size_t sg = 0; sg < n; ++sg) val[i] += v[off_d[a] + (mu * n + i) * n + sg] * x[mu] * x[sg];
          }
        double norm = max_abs(val);
        if (norm <= threshold) continue;
        // Expected closed forms: g(X,X) xi_1 and g(phi X, phi X) xi_a.
        double coeff = a == 0 ? gxx : dot(phx, phx);
        double lit = 0.0, cor = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          lit = std::max(lit, std::abs(val[i] - coeff * xi[i]));
          cor = std::max(cor, std::abs(val[i] + coeff * xi[i]));
        }
        literal[a] = lit / norm;
        corrected[a] = cor / norm;
        out.witnesses.push_back(Witness{a + 1, m.chart().to_point(pt), x, val, norm});
        found[a] = true;
        break;
      }
    }
  }
  ResidualReport& r = out.report;
  r.check = "phi-not-killing";
  r.tolerance = opt.tol;
  r.points = opt.points;
  r.pass = found[0] && found[1] && found[2];
  r.max_rel = r.pass ? 0.0 : std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    std::string k = "alpha" + std::to_string(a + 1);
    r.extra[k + ".found"] = found[a] ? 1.0 : 0.0;
    if (!found[a]) {
      r.notes.push_back("no witness for alpha=" + std::to_string(a + 1));
      continue;
    }
    r.extra[k + ".literal_form_relative_residual"] = literal[a];
    r.extra[k + ".negated_form_relative_residual"] = corrected[a];
  }
  for (const auto& w : out.witnesses) r.extra["alpha" + std::to_string(w.alpha) + ".witness_norm"] = w.norm;
  return out;
}

ConformalKillingReport conformal_to_killing_check(const Manifold& m, const MixedThreeStructure& s,
                                                  const TensorField& x, const CheckOptions& opt) {
  validate_structure(m, s);
  std::size_t n = m.dim();
  ConformalKillingReport out;
  ConformalFactor cf = conformal_killing_factor(x, m, opt);
  // f = eps_a (L_X g)(xi_a, xi_a) at the same sample points.
  TensorField lie = lie_derivative_metric(x, m);
  std::vector<Expr> quad;
  for (int a = 0; a < 3; ++a) {
    std::vector<Expr> t;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!lie.at({i, j}).is_zero() && !s.xi[a][i].is_zero() && !s.xi[a][j].is_zero())
          t.push_back(lie.at({i, j}) * s.xi[a][i] * s.xi[a][j]);
    quad.push_back(Expr(s.eps[a]) * sum_of(std::move(t)));
  }
  Program qp = m.compile(quad);
  ResidualAccumulator factor("factor", opt.tol), ident("factor-identity", opt.tol);
  auto pts = sample_points(m.chart(), opt.points, opt.seed);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    Point p = m.chart().to_point(pts[k]);
    double f = cf.factors[k];
    factor.add(p, std::abs(f), 1.0);
    auto q = qp(pts[k]);
    double worst = 0.0, sc = std::abs(f);
    for (double v : q) {
      worst = std::max(worst, std::abs(v - f));
      sc = std::max(sc, std::abs(v));
    }
    ident.add(p, worst, std::max(sc, 1.0));
  }
  Collector geo;
  for (int a = 0; a < 3; ++a) {
    TensorField dxi = covariant_derivative(s.xi[a], m);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Expr> t;
      for (std::size_t j = 0; j < n; ++j)
        if (!s.xi[a][j].is_zero() && !dxi.at({j, i}).is_zero()) t.push_back(s.xi[a][j] * dxi.at({j, i}));
      Expr v = sum_of(std::move(t));
      geo.add(v, {v, s.xi[a][i]});
    }
  }
  ResidualReport conformal = with_name(cf.report, "conformal");
  std::vector<ResidualReport> parts{conformal, factor.finish(), ident.finish(), geo.run("xi-geodesic", m, opt)};
  out.report = merge_reports("conformal-to-killing", parts);
  out.report.extra["max_abs_factor"] = cf.report.extra.count("max_abs_factor") ? cf.report.extra.at("max_abs_factor")
                                                                                  : max_abs(cf.factors);
  if (!cf.report.pass) {
    out.status = ConformalStatus::NotConformal;
    out.report.notes.push_back("not a conformal Killing vector");
  } else if (parts[1].pass) {
    out.status = ConformalStatus::Killing;
  } else {
    out.status = ConformalStatus::ConformalNotKilling;
    out.report.notes.push_back("conformal Killing but not Killing");
  }
  return out;
}

TensorField odd_rank_candidate(const Manifold& m, const MixedThreeStructure& s, int alpha, int k) {
  validate_structure(m, s);
  if (alpha < 1 || alpha > 3) throw std::invalid_argument("alpha must be 1, 2 or 3");
  int nn = static_cast<int>((m.dim() - 3) / 4);
  if (k < 0 || k > 2 * nn + 1) throw GeometryError("rank index k must lie in 0..2n+1");
  const TensorField& eta = s.eta[alpha - 1];
  TensorField d = exterior_derivative(eta, m.chart());
  TensorField f = eta;
  for (int i = 0; i < k; ++i) f = wedge(f, d);
  f = simplified(f);
  bool zero = true;
  for (const auto& c : f.components()) zero = zero && c.is_zero();
  if (zero) throw GeometryError("candidate form is identically zero");
  return f;
}

ResidualReport ky_odd_rank_check(const Manifold& m, const MixedThreeStructure& s, int alpha, int k,
                                 const CheckOptions& opt) {
  TensorField f = odd_rank_candidate(m, s, alpha, k);
  ResidualReport r = ky_residual(f, m, opt);
  r.check = "ky-odd-rank";
  r.extra["rank"] = static_cast<double>(2 * k + 1);
  return r;
}

}  // namespace hidsym
