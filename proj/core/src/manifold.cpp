#include "hidsym/manifold.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <unordered_map>

#include "hidsym/simplify.hpp"

namespace hidsym {

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(std::vector<std::string> coordinates, std::vector<Interval> box)
    : coords_(std::move(coordinates)), box_(std::move(box)) {
  if (coords_.size() != box_.size()) throw GeometryError("chart box does not match coordinates");
  std::set<std::string> seen;
  for (const auto& c : coords_)
    if (!seen.insert(c).second) throw GeometryError("duplicate coordinate '" + c + "'");
  for (std::size_t i = 0; i < box_.size(); ++i)
    if (!(box_[i].lo < box_[i].hi)) throw GeometryError("empty domain interval for '" + coords_[i] + "'");
}

std::size_t Chart::index_of(const std::string& name) const {
  auto it = std::find(coords_.begin(), coords_.end(), name);
  if (it == coords_.end()) throw GeometryError("unknown coordinate '" + name + "'");
  return static_cast<std::size_t>(it - coords_.begin());
}

bool Chart::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < box_.size(); ++i)
    if (!(x[i] > box_[i].lo && x[i] < box_[i].hi)) return false;
  return true;
}

Point Chart::to_point(std::span<const double> x) const {
  Point p;
  for (std::size_t i = 0; i < coords_.size(); ++i) p[coords_[i]] = x[i];
  return p;
}

std::vector<double> Chart::to_values(const Point& p) const {
  if (p.size() != coords_.size()) throw GeometryError("point does not match chart");
  std::vector<double> x;
  for (const auto& c : coords_) {
    auto it = p.find(c);
    if (it == p.end()) throw GeometryError("point lacks coordinate '" + c + "'");
    x.push_back(it->second);
  }
  return x;
}

std::vector<std::vector<double>> sample_points(const Chart& chart, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> out(count, std::vector<double>(chart.dim()));
  for (auto& x : out)
    for (std::size_t i = 0; i < chart.dim(); ++i) {
      std::uniform_real_distribution<double> u(chart.box()[i].lo, chart.box()[i].hi);
      x[i] = u(rng);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Manifold

struct Manifold::Cache {
  std::once_flag inv_once, chr_once, riem_once, ric_once;
  Matrix inv;
  std::vector<Expr> chr;
  TensorField riem;
  TensorField ric;
};

Manifold::Manifold(std::string name, Chart chart, Matrix metric, ParamEnv params, std::vector<int> signature)
    : name_(std::move(name)),
      chart_(std::move(chart)),
      g_(std::move(metric)),
      params_(std::move(params)),
      signature_(std::move(signature)),
      cache_(std::make_shared<Cache>()) {
  std::size_t n = chart_.dim();
  if (n < 2) throw GeometryError("dimension must be at least 2");
  if (g_.size() != n) throw GeometryError("metric has wrong size");
  for (const auto& row : g_)
    if (row.size() != n) throw GeometryError("metric has wrong size");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!(g_[i][j] == g_[j][i])) throw GeometryError("metric is not symmetric");
  if (signature_.size() != n) throw GeometryError("signature has wrong length");
  for (int s : signature_)
    if (s != 1 && s != -1) throw GeometryError("signature entries must be +1 or -1");
  auto coords = chart_.coordinate_set();
  for (const auto& row : g_)
    for (const auto& e : row) {
      for (const auto& p : free_parameters(e))
        if (!params_.count(p)) throw GeometryError("metric uses unbound parameter '" + p + "'");
      for (const auto& c : free_coordinates(e))
        if (!coords.count(c)) throw GeometryError("metric uses unknown coordinate '" + c + "'");
    }
}

TensorField Manifold::metric_tensor() const { return TensorField::covariant2(g_, Symmetry::Symmetric); }

namespace {

bool is_diagonal(const Matrix& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (i != j && !g[i][j].is_zero()) return false;
  return true;
}

// Determinant of the submatrix on (rows, cols) bitmasks, memoized.
class Minors {
 public:
  explicit Minors(const Matrix& g) : g_(g) {}

  Expr det(std::uint32_t rows, std::uint32_t cols) {
    if (rows == 0) return Expr(1);
    std::uint64_t key = (static_cast<std::uint64_t>(rows) << 32) | cols;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    auto r = static_cast<std::size_t>(__builtin_ctz(rows));
    std::vector<Expr> terms;
    int pos = 0;
    for (std::size_t c = 0; c < g_.size(); ++c) {
      if (!(cols & (1u << c))) continue;
      if (!g_[r][c].is_zero()) {
        Expr t = g_[r][c] * det(rows & ~(1u << r), cols & ~(1u << c));
        terms.push_back(pos % 2 ? -t : t);
      }
      ++pos;
    }
    Expr out = simplify(make_sum(std::move(terms)));
    memo_.emplace(key, out);
    return out;
  }

 private:
  const Matrix& g_;
  std::unordered_map<std::uint64_t, Expr> memo_;
};

}  // namespace

const Matrix& Manifold::inverse_metric() const {
  std::call_once(cache_->inv_once, [this] {
    std::size_t n = dim();
    Matrix inv(n, std::vector<Expr>(n));
    if (is_diagonal(g_)) {
      for (std::size_t i = 0; i < n; ++i) {
        if (g_[i][i].is_zero()) throw GeometryError("metric is singular");
        inv[i][i] = simplify(Expr(1) / g_[i][i]);
      }
    } else {
      Minors minors(g_);
      std::uint32_t all = (1u << n) - 1;
      Expr det = minors.det(all, all);
      if (det.is_zero()) throw GeometryError("metric is singular");
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
          // (g^-1)_{ij} = (-1)^{i+j} M_{ji} / det
          Expr m = minors.det(all & ~(1u << j), all & ~(1u << i));
          Expr c = (i + j) % 2 ? -m : m;
          inv[i][j] = inv[j][i] = c.is_zero() ? Expr() : simplify(c / det);
        }
    }
    cache_->inv = std::move(inv);
  });
  return cache_->inv;
}

TensorField Manifold::inverse_metric_tensor() const {
  const Matrix& inv = inverse_metric();
  std::size_t n = dim();
  TensorField t(n, {Variance::Up, Variance::Up}, Symmetry::Symmetric);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) t.at({i, j}) = inv[i][j];
  return t;
}

const std::vector<Expr>& Manifold::christoffel() const {
  std::call_once(cache_->chr_once, [this] {
    std::size_t n = dim();
    const Matrix& inv = inverse_metric();
    // dg[l][m][v] = d_l g_{mv}
    std::vector<Expr> dg(n * n * n);
    for (std::size_t l = 0; l < n; ++l) {
      Differentiator d(chart_.coordinates()[l]);
      for (std::size_t m = 0; m < n; ++m)
        for (std::size_t v = m; v < n; ++v)
          dg[(l * n + m) * n + v] = dg[(l * n + v) * n + m] = simplify(d(g_[m][v]));
    }
    auto D = [&](std::size_t l, std::size_t m, std::size_t v) -> const Expr& { return dg[(l * n + m) * n + v]; };
    // first kind: G_{l mu nu} = 1/2 (d_mu g_{l nu} + d_nu g_{l mu} - d_l g_{mu nu})
    std::vector<Expr> first(n * n * n);
    Expr half(Rational(1, 2));
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t mu = 0; mu < n; ++mu)
        for (std::size_t nu = mu; nu < n; ++nu) {
          Expr s = half * (D(mu, l, nu) + D(nu, l, mu) - D(l, mu, nu));
          first[(l * n + mu) * n + nu] = first[(l * n + nu) * n + mu] = s;
        }
    std::vector<Expr> chr(n * n * n);
    for (std::size_t rho = 0; rho < n; ++rho)
      for (std::size_t mu = 0; mu < n; ++mu)
        for (std::size_t nu = mu; nu < n; ++nu) {
          std::vector<Expr> terms;
          for (std::size_t l = 0; l < n; ++l) {
            const Expr& f = first[(l * n + mu) * n + nu];
            if (!inv[rho][l].is_zero() && !f.is_zero()) terms.push_back(inv[rho][l] * f);
          }
          Expr c = simplify(make_sum(std::move(terms)));
          chr[(rho * n + mu) * n + nu] = chr[(rho * n + nu) * n + mu] = c;
        }
    cache_->chr = std::move(chr);
  });
  return cache_->chr;
}

const Expr& Manifold::christoffel(std::size_t rho, std::size_t mu, std::size_t nu) const {
  std::size_t n = dim();
  return christoffel()[(rho * n + mu) * n + nu];
}

const TensorField& Manifold::riemann() const {
  std::call_once(cache_->riem_once, [this] {
    std::size_t n = dim();
    const auto& G = christoffel();
    auto C = [&](std::size_t a, std::size_t b, std::size_t c) -> const Expr& { return G[(a * n + b) * n + c]; };
    std::vector<Differentiator> d;
    for (const auto& c : chart_.coordinates()) d.emplace_back(c);
    TensorField R(n, {Variance::Up, Variance::Down, Variance::Down, Variance::Down});
    for (std::size_t rho = 0; rho < n; ++rho)
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t mu = 0; mu < n; ++mu)
          for (std::size_t nu = mu + 1; nu < n; ++nu) {
            std::vector<Expr> terms{d[mu](C(rho, nu, s)), -d[nu](C(rho, mu, s))};
            for (std::size_t l = 0; l < n; ++l) {
              if (!C(rho, mu, l).is_zero() && !C(l, nu, s).is_zero()) terms.push_back(C(rho, mu, l) * C(l, nu, s));
              if (!C(rho, nu, l).is_zero() && !C(l, mu, s).is_zero()) terms.push_back(-(C(rho, nu, l) * C(l, mu, s)));
            }
            Expr v = simplify(make_sum(std::move(terms)));
            R.at({rho, s, mu, nu}) = v;
            R.at({rho, s, nu, mu}) = -v;
          }
    cache_->riem = std::move(R);
  });
  return cache_->riem;
}

const TensorField& Manifold::ricci() const {
  std::call_once(cache_->ric_once, [this] {
    TensorField ric = simplified(contract(riemann(), 0, 2));
    ric.set_symmetry(Symmetry::Symmetric);
    cache_->ric = std::move(ric);
  });
  return cache_->ric;
}

Program Manifold::compile(std::span<const Expr> exprs) const {
  return Program(exprs, chart_.coordinates(), params_);
}

void validate_metric(const Manifold& m, std::size_t count, std::uint64_t seed) {
  std::size_t n = m.dim();
  std::vector<Expr> flat;
  for (const auto& row : m.metric()) flat.insert(flat.end(), row.begin(), row.end());
  Program prog = m.compile(flat);
  int want_neg = static_cast<int>(std::count(m.signature().begin(), m.signature().end(), -1));
  for (const auto& x : sample_points(m.chart(), count, seed)) {
    auto v = prog(x);
    Eigen::MatrixXd g(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g(i, j) = v[i * n + j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    const auto& ev = es.eigenvalues();
    double scale = ev.cwiseAbs().maxCoeff();
    int neg = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (std::abs(ev(i)) <= 1e-12 * std::max(1.0, scale)) throw GeometryError("metric is degenerate at a sampled point");
      if (ev(i) < 0) ++neg;
    }
    if (neg != want_neg) throw GeometryError("metric signature does not match the declared one");
  }
}

// ---------------------------------------------------------------------------
// Tensor calculus

TensorField partial_derivative(const TensorField& t, const Chart& chart) {
  std::size_t n = t.dim();
  std::vector<Variance> slots{Variance::Down};
  slots.insert(slots.end(), t.slots().begin(), t.slots().end());
  TensorField out(n, slots);
  for (std::size_t l = 0; l < n; ++l) {
    Differentiator d(chart.coordinates()[l]);
    for (std::size_t k = 0; k < t.size(); ++k) out[l * t.size() + k] = d(t[k]);
  }
  return out;
}

TensorField lie_bracket(const TensorField& x, const TensorField& y, const Chart& chart) {
  if (x.rank() != 1 || y.rank() != 1 || x.variance(0) != Variance::Up || y.variance(0) != Variance::Up)
    throw std::invalid_argument("Lie bracket needs two vector fields");
  std::size_t n = x.dim();
  std::vector<Differentiator> d;
  for (const auto& c : chart.coordinates()) d.emplace_back(c);
  std::vector<Expr> out(n);
  for (std::size_t mu = 0; mu < n; ++mu) {
    std::vector<Expr> terms;
    for (std::size_t nu = 0; nu < n; ++nu) {
      if (!x[nu].is_zero()) terms.push_back(x[nu] * d[nu](y[mu]));
      if (!y[nu].is_zero()) terms.push_back(-(y[nu] * d[nu](x[mu])));
    }
    out[mu] = make_sum(std::move(terms));
  }
  return TensorField::vector(std::move(out));
}

TensorField covariant_derivative(const TensorField& t, const Manifold& m) {
  std::size_t n = t.dim();
  if (n != m.dim()) throw GeometryError("tensor dimension does not match manifold");
  TensorField out = partial_derivative(t, m.chart());
  std::size_t r = t.rank();
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t k = 0; k < t.size(); ++k) {
      Index idx = t.unflat(k);
      std::vector<Expr> terms{out[l * t.size() + k]};
      for (std::size_t s = 0; s < r; ++s) {
        Index j = idx;
        for (std::size_t c = 0; c < n; ++c) {
          j[s] = c;
          const Expr& tc = t.at(j);
          if (tc.is_zero()) continue;
          if (t.variance(s) == Variance::Up) {
            const Expr& G = m.christoffel(idx[s], l, c);
            if (!G.is_zero()) terms.push_back(G * tc);
          } else {
            const Expr& G = m.christoffel(c, l, idx[s]);
            if (!G.is_zero()) terms.push_back(-(G * tc));
          }
        }
      }
      out[l * t.size() + k] = make_sum(std::move(terms));
    }
  return out;
}

namespace {

TensorField move_index(const TensorField& t, std::size_t slot, const Matrix& h, Variance to) {
  if (slot >= t.rank()) throw std::invalid_argument("slot out of range");
  if (t.variance(slot) == to) throw std::invalid_argument("slot already has the requested variance");
  std::vector<Variance> slots = t.slots();
  slots[slot] = to;
  TensorField out(t.dim(), slots, t.symmetry());
  std::size_t n = t.dim();
  for (std::size_t k = 0; k < out.size(); ++k) {
    Index idx = out.unflat(k);
    Index j = idx;
    std::vector<Expr> terms;
    for (std::size_t b = 0; b < n; ++b) {
      j[slot] = b;
      const Expr& h_ab = h[idx[slot]][b];
      const Expr& c = t.at(j);
      if (!h_ab.is_zero() && !c.is_zero()) terms.push_back(h_ab * c);
    }
    out[k] = make_sum(std::move(terms));
  }
  return out;
}

}  // namespace

TensorField lower_index(const TensorField& t, std::size_t slot, const Manifold& m) {
  return move_index(t, slot, m.metric(), Variance::Down);
}

TensorField raise_index(const TensorField& t, std::size_t slot, const Manifold& m) {
  return move_index(t, slot, m.inverse_metric(), Variance::Up);
}

TensorField lower_all(const TensorField& t, const Manifold& m) {
  TensorField out = t;
  for (std::size_t s = 0; s < t.rank(); ++s)
    if (out.variance(s) == Variance::Up) out = lower_index(out, s, m);
  return out;
}

namespace {

void require_form(const TensorField& f) {
  if (!f.all_down()) throw std::invalid_argument("differential form must be fully covariant");
}

// Visits strictly increasing index tuples of length p.
template <class F>
void for_each_increasing(std::size_t n, std::size_t p, F&& f) {
  Index idx(p);
  for (std::size_t k = 0; k < p; ++k) idx[k] = k;
  if (p > n) return;
  for (;;) {
    f(idx);
    std::size_t k = p;
    while (k > 0 && idx[k - 1] == n - p + k - 1) --k;
    if (k == 0) return;
    ++idx[k - 1];
    for (std::size_t j = k; j < p; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Fills every permutation of the increasing tuple `idx` with signed copies.
void scatter(TensorField& out, const Index& idx, const Expr& value) {
  std::vector<std::size_t> order(idx.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  do {
    Index p(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) p[k] = idx[order[k]];
    out.at(p) = permutation_sign(order) > 0 ? value : -value;
  } while (std::next_permutation(order.begin(), order.end()));
}

}  // namespace

TensorField exterior_derivative(const TensorField& f, const Chart& chart) {
  require_form(f);
  std::size_t n = f.dim();
  std::size_t p = f.rank();
  TensorField out(n, std::vector<Variance>(p + 1, Variance::Down), Symmetry::Antisymmetric);
  std::vector<Differentiator> d;
  for (const auto& c : chart.coordinates()) d.emplace_back(c);
  for_each_increasing(n, p + 1, [&](const Index& idx) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k <= p; ++k) {
      Index rest;
      for (std::size_t j = 0; j <= p; ++j)
        if (j != k) rest.push_back(idx[j]);
      Expr t = d[idx[k]](f.at(rest));
      if (t.is_zero()) continue;
      terms.push_back(k % 2 ? -t : t);
    }
    scatter(out, idx, make_sum(std::move(terms)));
  });
  return out;
}

TensorField codifferential(const TensorField& f, const Manifold& m) {
  require_form(f);
  std::size_t n = f.dim();
  std::size_t p = f.rank();
  if (p == 0) return TensorField::scalar(n, Expr());
  TensorField nab = covariant_derivative(f, m);
  const Matrix& inv = m.inverse_metric();
  TensorField out(n, std::vector<Variance>(p - 1, Variance::Down), Symmetry::Antisymmetric);
  for (std::size_t k = 0; k < out.size(); ++k) {
    Index rest = out.unflat(k);
    std::vector<Expr> terms;
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t mu = 0; mu < n; ++mu) {
        if (inv[l][mu].is_zero()) continue;
        Index j{l, mu};
        j.insert(j.end(), rest.begin(), rest.end());
        const Expr& c = nab.at(j);
        if (!c.is_zero()) terms.push_back(inv[l][mu] * c);
      }
    out[k] = -make_sum(std::move(terms));
  }
  return out;
}

TensorField wedge1(const TensorField& alpha, const TensorField& beta) {
  require_form(alpha);
  require_form(beta);
  if (alpha.rank() != 1) throw std::invalid_argument("wedge1 needs a 1-form on the left");
  std::size_t n = alpha.dim();
  std::size_t p = beta.rank();
  TensorField out(n, std::vector<Variance>(p + 1, Variance::Down), Symmetry::Antisymmetric);
  for_each_increasing(n, p + 1, [&](const Index& idx) {
    std::vector<Expr> terms;
    for (std::size_t k = 0; k <= p; ++k) {
      Index rest;
      for (std::size_t j = 0; j <= p; ++j)
        if (j != k) rest.push_back(idx[j]);
      const Expr& a = alpha[idx[k]];
      const Expr& b = p == 0 ? beta[0] : beta.at(rest);
      if (a.is_zero() || b.is_zero()) continue;
      Expr t = a * b;
      terms.push_back(k % 2 ? -t : t);
    }
    scatter(out, idx, make_sum(std::move(terms)));
  });
  return out;
}

TensorField wedge(const TensorField& alpha, const TensorField& beta) {
  require_form(alpha);
  require_form(beta);
  std::size_t n = alpha.dim();
  std::size_t p = alpha.rank();
  std::size_t q = beta.rank();
  if (p == 0) return alpha[0] * beta;
  if (q == 0) return beta[0] * alpha;
  TensorField out(n, std::vector<Variance>(p + q, Variance::Down), Symmetry::Antisymmetric);
  if (p + q > n) return out;
  // Sum over (p, q) shuffles of the increasing tuple.
  for_each_increasing(n, p + q, [&](const Index& idx) {
    std::vector<Expr> terms;
    for_each_increasing(p + q, p, [&](const Index& pick) {
      Index a, b, order;
      std::vector<bool> in_a(p + q, false);
      for (auto k : pick) in_a[k] = true;
      for (std::size_t k = 0; k < p + q; ++k)
        if (in_a[k]) {
          a.push_back(idx[k]);
          order.push_back(k);
        }
      for (std::size_t k = 0; k < p + q; ++k)
        if (!in_a[k]) {
          b.push_back(idx[k]);
          order.push_back(k);
        }
      const Expr& x = alpha.at(a);
      const Expr& y = beta.at(b);
      if (x.is_zero() || y.is_zero()) return;
      Expr t = x * y;
      terms.push_back(permutation_sign(order) > 0 ? t : -t);
    });
    scatter(out, idx, make_sum(std::move(terms)));
  });
  return out;
}

}  // namespace hidsym
