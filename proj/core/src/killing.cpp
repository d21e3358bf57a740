#include "hidsym/killing.hpp"

#include <Eigen/Dense>
#include <array>
#include <map>
#include <cmath>
#include <stdexcept>

#include "hidsym/simplify.hpp"

namespace hidsym {

namespace {

std::vector<Expr> concat(std::initializer_list<const std::vector<Expr>*> parts) {
  std::vector<Expr> out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

TensorField as_vector(const TensorField& x, const Manifold& m) {
  if (x.rank() != 1) throw std::invalid_argument("expected a vector field");
  return x.variance(0) == Variance::Up ? x : raise_index(x, 0, m);
}

Eigen::MatrixXd to_matrix(std::span<const double> v, std::size_t n) {
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = v[i * n + j];
  return a;
}

std::vector<Expr> flat_matrix(const Matrix& g) {
  std::vector<Expr> out;
  for (const auto& row : g) out.insert(out.end(), row.begin(), row.end());
  return out;
}

}  // namespace

void require_antisymmetric(const TensorField& f, const Manifold& m) {
  if (!f.all_down()) throw std::invalid_argument("form must be fully covariant");
  if (structurally_antisymmetric(f)) return;
  TensorField a = antisymmetrize(f);
  std::vector<Expr> diff;
  for (std::size_t k = 0; k < f.size(); ++k) diff.push_back(f[k] - a[k]);
  CheckOptions opt;
  opt.tol = 1e-12;
  if (!sampled_residual("antisymmetry", m, diff, f.components(), opt).pass)
    throw std::invalid_argument("tensor is not antisymmetric");
}

TensorField lie_derivative_metric(const TensorField& x_in, const Manifold& m) {
  TensorField x = as_vector(x_in, m);
  std::size_t n = m.dim();
  const Matrix& g = m.metric();
  TensorField dg = partial_derivative(m.metric_tensor(), m.chart());  // [l][m][v]
  TensorField dx = partial_derivative(x, m.chart());                  // [m][l] = d_m X^l
  TensorField out(n, {Variance::Down, Variance::Down}, Symmetry::Symmetric);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      std::vector<Expr> terms;
      for (std::size_t l = 0; l < n; ++l) {
        if (!x[l].is_zero() && !dg.at({l, a, b}).is_zero()) terms.push_back(x[l] * dg.at({l, a, b}));
        if (!g[l][b].is_zero() && !dx.at({a, l}).is_zero()) terms.push_back(g[l][b] * dx.at({a, l}));
        if (!g[a][l].is_zero() && !dx.at({b, l}).is_zero()) terms.push_back(g[a][l] * dx.at({b, l}));
      }
      out.at({a, b}) = make_sum(std::move(terms));
    }
  return out;
}

ResidualReport killing_vector_residual(const TensorField& x_in, const Manifold& m, const CheckOptions& opt) {
  TensorField x = as_vector(x_in, m);
  TensorField lie = lie_derivative_metric(x, m);
  TensorField dx = partial_derivative(x, m.chart());
  std::vector<Expr> g = flat_matrix(m.metric());
  auto scale = concat({&x.components(), &dx.components(), &g});
  return sampled_residual("killing-vector", m, lie.components(), scale, opt);
}

ConformalFactor conformal_killing_factor(const TensorField& x_in, const Manifold& m, const CheckOptions& opt) {
  TensorField x = as_vector(x_in, m);
  std::size_t n = m.dim();
  TensorField lie = lie_derivative_metric(x, m);
  std::vector<Expr> g = flat_matrix(m.metric());
  Program pl = m.compile(lie);
  Program pg = m.compile(g);
  Program px = m.compile(x);
  ConformalFactor out;
  ResidualAccumulator acc("conformal-killing", opt.tol);
  for (const auto& pt : sample_points(m.chart(), opt.points, opt.seed)) {
    auto l = pl(pt);
    auto gv = pg(pt);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < n * n; ++k) {
      num += l[k] * gv[k];
      den += gv[k] * gv[k];
    }
    double f = num / den;
    std::vector<double> r(n * n);
    for (std::size_t k = 0; k < n * n; ++k) r[k] = l[k] - f * gv[k];
    double scale = std::max({max_abs(l), max_abs(gv), max_abs(px(pt))});
    acc.add(m.chart().to_point(pt), max_abs(r), scale);
    out.factors.push_back(f);
  }
  out.report = acc.finish();
  double fmax = 0;
  for (double f : out.factors) fmax = std::max(fmax, std::abs(f));
  out.report.extra["max_abs_factor"] = fmax;
  return out;
}

ResidualReport sk_residual(const TensorField& k_in, const Manifold& m, const CheckOptions& opt) {
  TensorField k = lower_all(k_in, m);
  if (!structurally_symmetric(k)) throw std::invalid_argument("S-K candidate is not symmetric");
  TensorField nab = covariant_derivative(k, m);
  TensorField sym = symmetrize(nab);
  auto scale = concat({&k.components(), &nab.components()});
  return sampled_residual("sk", m, sym.components(), scale, opt);
}

ResidualReport ky_residual(const TensorField& f, const Manifold& m, const CheckOptions& opt) {
  require_antisymmetric(f, m);
  if (f.rank() == 0) throw std::invalid_argument("K-Y check needs a form of rank at least 1");
  TensorField nab = covariant_derivative(f, m);
  std::vector<Expr> res;
  // symmetric part in the first two slots
  for (std::size_t k = 0; k < nab.size(); ++k) {
    Index idx = nab.unflat(k);
    Index sw = idx;
    std::swap(sw[0], sw[1]);
    res.push_back(nab[k] + nab.at(sw));
  }
  TensorField anti = antisymmetrize(nab);
  for (std::size_t k = 0; k < nab.size(); ++k) res.push_back(nab[k] - anti[k]);
  auto scale = concat({&f.components(), &nab.components()});
  return sampled_residual("ky", m, res, scale, opt);
}

TensorField cky_residual_tensor(const TensorField& f, const Manifold& m) {
  require_antisymmetric(f, m);
  std::size_t n = m.dim();
  std::size_t p = f.rank();
  if (p < 1 || p > n - 1) throw std::invalid_argument("CKY check needs 1 <= p <= n-1");
  TensorField nab = covariant_derivative(f, m);
  TensorField df = exterior_derivative(f, m.chart());
  TensorField cod = codifferential(f, m);
  const Matrix& g = m.metric();
  TensorField out(n, nab.slots());
  Expr a(Rational(1, static_cast<std::int64_t>(p + 1)));
  Expr b(Rational(1, static_cast<std::int64_t>(n - p + 1)));
  for (std::size_t l = 0; l < n; ++l) {
    TensorField gl = TensorField::one_form(g[l]);
    TensorField w = wedge1(gl, cod);
    for (std::size_t k = 0; k < f.size(); ++k) {
      std::size_t at = l * f.size() + k;
      out[at] = nab[at] - a * df[at] + b * w[k];
    }
  }
  return out;
}

ResidualReport cky_residual(const TensorField& f, const Manifold& m, const CheckOptions& opt) {
  TensorField res = cky_residual_tensor(f, m);
  TensorField nab = covariant_derivative(f, m);
  auto scale = concat({&f.components(), &nab.components()});
  return sampled_residual("cky", m, res.components(), scale, opt);
}

ResidualReport covariant_constancy_residual(const TensorField& t, const Manifold& m, const CheckOptions& opt) {
  TensorField nab = covariant_derivative(t, m);
  Program pn = m.compile(nab);
  Program pt = m.compile(t);
  ResidualAccumulator acc("covconst", opt.tol);
  double worst_rel = -1;
  std::size_t worst_k = 0;
  double worst_val = 0;
  for (const auto& x : sample_points(m.chart(), opt.points, opt.seed)) {
    auto v = pn(x);
    double scale = std::max(max_abs(v), max_abs(pt(x)));
    double a = max_abs(v);
    acc.add(m.chart().to_point(x), a, scale);
    double rel = scale > 0 ? a / scale : 0;
    if (rel > worst_rel) {
      worst_rel = rel;
      worst_k = 0;
      for (std::size_t k = 0; k < v.size(); ++k)
        if (std::abs(v[k]) > std::abs(v[worst_k])) worst_k = k;
      worst_val = v[worst_k];
    }
  }
  ResidualReport r = acc.finish();
  r.check = "covconst";
  Index idx = nab.unflat(worst_k);
  std::string s = "worst component (derivative slot first):";
  for (auto i : idx) s += " " + m.chart().coordinates()[i];
  r.notes.push_back(s);
  r.extra["worst_component_value"] = worst_val;
  r.extra["worst_component_flat_index"] = static_cast<double>(worst_k);
  return r;
}

ResidualReport covariant_derivative_component_check(const TensorField& t, const Index& index, const Expr& expected,
                                                    const Manifold& m, const CheckOptions& opt) {
  TensorField nab = covariant_derivative(t, m);
  std::size_t at = nab.flat(index);
  Program pn = m.compile(nab);
  std::vector<Expr> ex{expected};
  Program pe = m.compile(ex);
  ResidualAccumulator acc("closed-form-component", opt.tol);
  for (const auto& x : sample_points(m.chart(), opt.points, opt.seed)) {
    auto v = pn(x);
    double e = pe(x)[0];
    double big = max_abs(v);
    double res = std::max(std::abs(v[at] - e), std::abs(big - std::abs(e)));
    acc.add(m.chart().to_point(x), res, std::max(big, std::abs(e)));
  }
  return acc.finish();
}

TensorField associated_sk(const TensorField& f_in, const Manifold& m) {
  TensorField f = lower_all(f_in, m);
  std::size_t n = m.dim();
  std::size_t p = f.rank();
  if (p == 0) throw std::invalid_argument("associated tensor needs a form of rank at least 1");
  TensorField raised = f;
  for (std::size_t s = 1; s < p; ++s) raised = raise_index(raised, s, m);
  std::size_t tail = f.size() / n;
  TensorField k(n, {Variance::Down, Variance::Down}, Symmetry::Symmetric);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) {
      std::vector<Expr> terms;
      for (std::size_t t = 0; t < tail; ++t) {
        const Expr& x = f[a * tail + t];
        const Expr& y = raised[b * tail + t];
        if (!x.is_zero() && !y.is_zero()) terms.push_back(x * y);
      }
      k.at({a, b}) = k.at({b, a}) = simplify(make_sum(std::move(terms)));
    }
  return k;
}

UnitRootReport unit_root_check(const TensorField& f, const Manifold& m, const CheckOptions& opt) {
  require_antisymmetric(f, m);
  if (f.rank() != 2) throw std::invalid_argument("unit-root check needs a 2-form");
  std::size_t n = m.dim();
  Program pf = m.compile(f);
  std::vector<Expr> gi = flat_matrix(m.inverse_metric());
  std::vector<Expr> g = flat_matrix(m.metric());
  Program pgi = m.compile(gi);
  Program pg = m.compile(g);
  UnitRootReport out;
  ResidualAccumulator strict("unit-root", opt.tol);
  ResidualAccumulator fitted("unit-root-fitted", opt.tol);
  for (const auto& x : sample_points(m.chart(), opt.points, opt.seed)) {
    Eigen::MatrixXd F = to_matrix(pf(x), n);
    Eigen::MatrixXd Gi = to_matrix(pgi(x), n);
    Eigen::MatrixXd G = to_matrix(pg(x), n);
    double fmax = F.cwiseAbs().maxCoeff();
    if (fmax == 0.0 || std::abs(F.determinant()) <= 1e-10 * std::pow(fmax, static_cast<double>(n)))
      throw GeometryError("2-form is singular at a sampled point");
    Eigen::MatrixXd S = F.transpose() * Gi * F;
    double c = (S.array() * G.array()).sum() / (G.array() * G.array()).sum();
    double scale = std::max(S.cwiseAbs().maxCoeff(), G.cwiseAbs().maxCoeff());
    Point p = m.chart().to_point(x);
    strict.add(p, (S - G).cwiseAbs().maxCoeff(), scale);
    fitted.add(p, (S - c * G).cwiseAbs().maxCoeff(), scale);
    out.scales.push_back(c);
  }
  out.strict = strict.finish();
  out.fitted = fitted.finish();
  double lo = out.scales.front(), hi = out.scales.front();
  for (double c : out.scales) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  for (auto* r : {&out.strict, &out.fitted}) {
    r->extra["fitted_scale_min"] = lo;
    r->extra["fitted_scale_max"] = hi;
  }
  return out;
}

ResidualReport quaternion_relations_check(const TensorField& f1, const TensorField& f2, const TensorField& f3,
                                          const Manifold& m, const CheckOptions& opt) {
  std::size_t n = m.dim();
  std::array<Program, 3> pf{m.compile(f1), m.compile(f2), m.compile(f3)};
  Program pgi = m.compile(flat_matrix(m.inverse_metric()));
  ResidualAccumulator anti("quaternion-anticommutator", opt.tol);
  ResidualAccumulator comm("quaternion-commutator", opt.tol);
  std::map<std::string, double> pair_worst;
  for (const auto& x : sample_points(m.chart(), opt.points, opt.seed)) {
    Eigen::MatrixXd Gi = to_matrix(pgi(x), n);
    std::array<Eigen::MatrixXd, 3> F;
    for (int i = 0; i < 3; ++i) F[i] = Gi * to_matrix(pf[i](x), n);
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    double worst_a = 0, worst_c = 0, scale = 2.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Eigen::MatrixXd ij = F[i] * F[j];
        Eigen::MatrixXd ji = F[j] * F[i];
        scale = std::max({scale, ij.cwiseAbs().maxCoeff(), ji.cwiseAbs().maxCoeff()});
        Eigen::MatrixXd ra = ij + ji + (i == j ? 2.0 : 0.0) * I;
        Eigen::MatrixXd rc = ij - ji;
        if (i != j) {
          int k = 3 - i - j;
          int eps = ((j - i + 3) % 3 == 1) ? 1 : -1;
          rc += 2.0 * eps * F[k];
        }
        double a = ra.cwiseAbs().maxCoeff(), c = rc.cwiseAbs().maxCoeff();
        worst_a = std::max(worst_a, a);
        worst_c = std::max(worst_c, c);
        std::string key = std::to_string(i + 1) + std::to_string(j + 1);
        pair_worst["anticommutator." + key] = std::max(pair_worst["anticommutator." + key], a);
        pair_worst["commutator." + key] = std::max(pair_worst["commutator." + key], c);
      }
    Point p = m.chart().to_point(x);
    anti.add(p, worst_a, scale);
    comm.add(p, worst_c, scale);
  }
  std::array<ResidualReport, 2> parts{anti.finish(), comm.finish()};
  ResidualReport r = merge_reports("quaternion", parts);
  for (const auto& [k, v] : pair_worst) r.extra[k + ".max_abs"] = v;
  return r;
}

}  // namespace hidsym
