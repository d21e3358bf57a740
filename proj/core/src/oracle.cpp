#include "hidsym/oracle.hpp"

#include <cmath>
#include <functional>

namespace hidsym {

namespace {

using Field = std::function<std::vector<double>(std::span<const double>)>;

// d/dx_k of every output of f, fourth-order central differences.
std::vector<std::vector<double>> gradient(const Field& f, std::span<const double> x, double h) {
  std::size_t n = x.size();
  std::vector<std::vector<double>> out(n);
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t k = 0; k < n; ++k) {
    auto at = [&](double s) {
      y[k] = x[k] + s * h;
      auto v = f(y);
      y[k] = x[k];
      return v;
    };
    auto p1 = at(1), m1 = at(-1), p2 = at(2), m2 = at(-2);
    out[k].resize(p1.size());
    for (std::size_t i = 0; i < p1.size(); ++i) out[k][i] = (8 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12 * h);
  }
  return out;
}

std::vector<double> invert(std::vector<double> a, std::size_t n) {
  std::vector<double> inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
    if (a[p * n + c] == 0.0) throw GeometryError("singular metric in finite-difference oracle");
    for (std::size_t k = 0; k < n; ++k) {
      std::swap(a[c * n + k], a[p * n + k]);
      std::swap(inv[c * n + k], inv[p * n + k]);
    }
    double d = a[c * n + c];
    for (std::size_t k = 0; k < n; ++k) {
      a[c * n + k] /= d;
      inv[c * n + k] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r * n + c];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= f * a[c * n + k];
        inv[r * n + k] -= f * inv[c * n + k];
      }
    }
  }
  return inv;
}

std::vector<double> christoffel_from(const Program& metric, std::size_t n, std::span<const double> x, double h) {
  Field g = [&](std::span<const double> y) { return metric(y); };
  auto dg = gradient(g, x, h);  // dg[k][a*n+b] = d_k g_ab
  auto gi = invert(metric(x), n);
  std::vector<double> out(n * n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t mu = 0; mu < n; ++mu)
      for (std::size_t nu = 0; nu < n; ++nu) {
        double s = 0.0;
        for (std::size_t l = 0; l < n; ++l)
          s += gi[r * n + l] * (dg[mu][l * n + nu] + dg[nu][l * n + mu] - dg[l][mu * n + nu]);
        out[(r * n + mu) * n + nu] = 0.5 * s;
      }
  return out;
}

Program metric_program(const Manifold& m) {
  std::vector<Expr> flat;
  for (const auto& row : m.metric()) flat.insert(flat.end(), row.begin(), row.end());
  return m.compile(flat);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

std::vector<double> fd_christoffel(const Manifold& m, std::span<const double> x, double h) {
  return christoffel_from(metric_program(m), m.dim(), x, h);
}

std::vector<double> fd_riemann(const Manifold& m, std::span<const double> x, double h) {
  std::size_t n = m.dim();
  Program g = metric_program(m);
  // Inner step smaller than the outer one keeps the nested stencils apart.
  double inner = h / 4;
  Field gam = [&](std::span<const double> y) { return christoffel_from(g, n, y, inner); };
  auto G = gam(x);
  auto dG = gradient(gam, x, h);  // dG[k][(r*n+a)*n+b]
  auto at = [&](std::size_t r, std::size_t a, std::size_t b) { return G[(r * n + a) * n + b]; };
  std::vector<double> R(n * n * n * n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t mu = 0; mu < n; ++mu)
        for (std::size_t nu = 0; nu < n; ++nu) {
          double v = dG[mu][(r * n + nu) * n + s] - dG[nu][(r * n + mu) * n + s];
          for (std::size_t l = 0; l < n; ++l) v += at(r, mu, l) * at(l, nu, s) - at(r, nu, l) * at(l, mu, s);
          R[((r * n + s) * n + mu) * n + nu] = v;
        }
  return R;
}

ResidualReport christoffel_oracle_check(const Manifold& m, const CheckOptions& opt) {
  Program sym = m.compile(std::span(m.christoffel()));
  ResidualAccumulator acc("christoffel-oracle", opt.tol);
  for (const auto& x : sample_points(m.chart(), opt.points, opt.seed)) {
    auto s = sym(x);
    auto f = fd_christoffel(m, x);
    acc.add(m.chart().to_point(x), max_abs_diff(s, f), max_abs(s));
  }
  return acc.finish();
}

ResidualReport riemann_oracle_check(const Manifold& m, const CheckOptions& opt) {
  Program sym = m.compile(m.riemann());
  Program gam = m.compile(std::span(m.christoffel()));
  ResidualAccumulator acc("riemann-oracle", opt.tol);
  for (const auto& x : sample_points(m.chart(), opt.points, opt.seed)) {
    auto s = sym(x);
    auto f = fd_riemann(m, x);
    // Flat charts have R = 0 from cancelling Gamma^2 terms; scale by those.
    double g = max_abs(gam(x));
    acc.add(m.chart().to_point(x), max_abs_diff(s, f), std::max(max_abs(s), g * g));
  }
  return acc.finish();
}

}  // namespace hidsym
