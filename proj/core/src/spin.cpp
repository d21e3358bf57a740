#include "hidsym/spin.hpp"

#include <cmath>
#include <random>

#include "hidsym/killing.hpp"
#include "hidsym/simplify.hpp"

namespace hidsym {

CExpr operator+(const CExpr& a, const CExpr& b) { return {a.re + b.re, a.im + b.im}; }
CExpr operator-(const CExpr& a, const CExpr& b) { return {a.re - b.re, a.im - b.im}; }
CExpr operator*(const CExpr& a, const CExpr& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
CExpr operator*(const GaussRational& c, const CExpr& a) {
  Expr cr(c.re), ci(c.im);
  return {cr * a.re - ci * a.im, cr * a.im + ci * a.re};
}
CExpr operator*(const Expr& s, const CExpr& a) { return {s * a.re, s * a.im}; }

namespace {

CExpr cconst(const GaussRational& c) { return {Expr(c.re), Expr(c.im)}; }
const GaussRational kI = GaussRational::i();

CExpr csimplify(const CExpr& c) { return {simplify(c.re), simplify(c.im)}; }

SpinMatrix zero_matrix(std::size_t n) { return SpinMatrix(n, std::vector<CExpr>(n)); }

SpinMatrix to_spin(const GaussMatrix& g) {
  SpinMatrix m = zero_matrix(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) m[i][j] = cconst(g[i][j]);
  return m;
}

GaussMatrix gmul(const GaussMatrix& a, const GaussMatrix& b) {
  std::size_t n = a.size();
  GaussMatrix c(n, std::vector<GaussRational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

GaussMatrix kron(const GaussMatrix& a, const GaussMatrix& b) {
  std::size_t n = a.size(), m = b.size();
  GaussMatrix c(n * m, std::vector<GaussRational>(n * m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) c[i * m + k][j * m + l] = a[i][j] * b[k][l];
  return c;
}

SpinMatrix mmul(const SpinMatrix& a, const SpinMatrix& b) {
  std::size_t n = a.size();
  SpinMatrix c = zero_matrix(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Expr> re, im;
      for (std::size_t k = 0; k < n; ++k) {
        if (a[i][k].is_zero() || b[k][j].is_zero()) continue;
        CExpr p = a[i][k] * b[k][j];
        re.push_back(p.re);
        im.push_back(p.im);
      }
      c[i][j] = {make_sum(std::move(re)), make_sum(std::move(im))};
    }
  return c;
}

void accumulate(SpinMatrix& acc, const Expr& s, const SpinMatrix& m) {
  if (s.is_zero()) return;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (!m[i][j].is_zero()) acc[i][j] = acc[i][j] + s * m[i][j];
}

SpinMatrix scaled(const GaussRational& c, const SpinMatrix& m) {
  SpinMatrix out = m;
  for (auto& row : out)
    for (auto& e : row)
      if (!e.is_zero()) e = c * e;
  return out;
}

SpinMatrix simplified(const SpinMatrix& m) {
  SpinMatrix out = m;
  for (auto& row : out)
    for (auto& e : row) e = csimplify(e);
  return out;
}

double modulus_max(std::span<const double> v) {
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) best = std::max(best, std::hypot(v[i], v[i + 1]));
  return best;
}

std::vector<Expr> flatten(const SpinorField& psi) {
  std::vector<Expr> out;
  for (const auto& c : psi) {
    out.push_back(c.re);
    out.push_back(c.im);
  }
  return out;
}

// Shared driver for the three residuals: first and second lists are the two
// operator orderings, combined with sign.
ResidualReport pair_residual(std::string name, const SpinGeometry& sg, const std::vector<SpinorField>& first,
                             const std::vector<SpinorField>& second, double sign, const CheckOptions& opt) {
  const Manifold& m = sg.manifold();
  ResidualAccumulator acc(name, opt.tol);
  auto pts = sample_points(m.chart(), opt.points, opt.seed);
  for (std::size_t k = 0; k < first.size(); ++k) {
    std::vector<Expr> all = flatten(first[k]);
    std::vector<Expr> rest = flatten(second[k]);
    std::size_t half = all.size();
    all.insert(all.end(), rest.begin(), rest.end());
    Program prog = m.compile(all);
    for (const auto& x : pts) {
      std::vector<double> v = prog(x);
      std::vector<double> comb(half);
      for (std::size_t i = 0; i < half; ++i) comb[i] = v[i] + sign * v[half + i];
      double scale = modulus_max(std::span(v.data(), half)) + modulus_max(std::span(v.data() + half, half));
      acc.add(m.chart().to_point(x), modulus_max(comb), scale);
    }
  }
  ResidualReport r = acc.finish();
  r.extra["bank_size"] = static_cast<double>(first.size());
  return r;
}

}  // namespace

Frame orthonormal_frame(const Manifold& m) {
  std::size_t n = m.dim();
  const Matrix& g = m.metric();
  bool diagonal = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !g[i][j].is_zero()) diagonal = false;
  auto pts = sample_points(m.chart(), 5, 0);
  auto sign_of = [&](const Expr& d, std::size_t a) {
    Program p = m.compile(std::span(&d, 1));
    int s = 0;
    for (const auto& x : pts) {
      double v = p(x)[0];
      int here = v > 0 ? 1 : (v < 0 ? -1 : 0);
      if (here == 0 || (s != 0 && here != s))
        throw GeometryError("frame pivot " + std::to_string(a) + " changes sign or vanishes on the chart");
      s = here;
    }
    return s;
  };
  Matrix e(n, std::vector<Expr>(n));
  std::vector<int> eta(n);
  if (diagonal) {
    for (std::size_t a = 0; a < n; ++a) {
      eta[a] = sign_of(g[a][a], a);
      e[a][a] = simplify(sqrt(eta[a] > 0 ? g[a][a] : -g[a][a]));
    }
  } else {
    // g = L D L^T with unit lower-triangular L.
    Matrix L(n, std::vector<Expr>(n));
    std::vector<Expr> D(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<Expr> t{g[i][i]};
      for (std::size_t k = 0; k < i; ++k) t.push_back(-(L[i][k] * L[i][k] * D[k]));
      D[i] = simplify(make_sum(std::move(t)));
      if (D[i].is_zero()) throw GeometryError("symbolic LDL pivot vanishes; supply a frame explicitly");
      L[i][i] = Expr(1);
      for (std::size_t j = i + 1; j < n; ++j) {
        std::vector<Expr> s{g[j][i]};
        for (std::size_t k = 0; k < i; ++k) s.push_back(-(L[j][k] * L[i][k] * D[k]));
        L[j][i] = simplify(make_sum(std::move(s)) / D[i]);
      }
    }
    for (std::size_t a = 0; a < n; ++a) {
      eta[a] = sign_of(D[a], a);
      Expr s = simplify(sqrt(eta[a] > 0 ? D[a] : -D[a]));
      for (std::size_t mu = 0; mu < n; ++mu)
        if (!L[mu][a].is_zero()) e[a][mu] = simplify(s * L[mu][a]);
    }
  }
  return orthonormal_frame(m, e, eta);
}

Frame orthonormal_frame(const Manifold& m, const Matrix& coframe, std::vector<int> eta) {
  std::size_t n = m.dim();
  if (coframe.size() != n) throw GeometryError("coframe has the wrong number of rows");
  for (const auto& row : coframe)
    if (row.size() != n) throw GeometryError("coframe has the wrong number of columns");
  if (eta.empty()) eta = m.signature();
  if (eta.size() != n) throw GeometryError("frame signature has the wrong length");
  const Matrix& gi = m.inverse_metric();
  Frame f{coframe, Matrix(n, std::vector<Expr>(n)), eta};
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t mu = 0; mu < n; ++mu) {
      std::vector<Expr> t;
      for (std::size_t nu = 0; nu < n; ++nu)
        if (!gi[mu][nu].is_zero() && !coframe[a][nu].is_zero()) t.push_back(gi[mu][nu] * coframe[a][nu]);
      f.inv[a][mu] = simplify(Expr(eta[a]) * make_sum(std::move(t)));
    }
  CheckOptions opt;
  opt.tol = 1e-10;
  ResidualReport r = frame_residual(m, f, opt);
  if (!r.pass) throw GeometryError("coframe does not reproduce the metric (relative residual " +
                                   std::to_string(r.max_rel) + ")");
  return f;
}

ResidualReport frame_residual(const Manifold& m, const Frame& f, const CheckOptions& opt) {
  std::size_t n = m.dim();
  std::vector<Expr> res, scale;
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = 0; nu < n; ++nu) {
      std::vector<Expr> t;
      for (std::size_t a = 0; a < n; ++a) t.push_back(Expr(f.eta[a]) * f.e[a][mu] * f.e[a][nu]);
      res.push_back(make_sum(std::move(t)) - m.metric()[mu][nu]);
      scale.push_back(m.metric()[mu][nu]);
    }
  return sampled_residual("frame", m, res, scale, opt);
}

GammaRep gamma_matrices(std::size_t dim, std::vector<int> eta) {
  if (dim == 0) throw GeometryError("gamma matrices need dim >= 1");
  if (eta.empty()) eta.assign(dim, 1);
  if (eta.size() != dim) throw GeometryError("signature length must equal dim");
  const GaussRational one(1), zero(0), i = kI;
  GaussMatrix id{{one, zero}, {zero, one}};
  GaussMatrix s1{{zero, one}, {one, zero}};
  GaussMatrix s2{{zero, -i}, {i, zero}};
  GaussMatrix s3{{one, zero}, {zero, -one}};
  std::size_t k = dim / 2;
  auto chain = [&](std::size_t j, const GaussMatrix& mid) {
    GaussMatrix out{{one}};
    for (std::size_t t = 0; t < k; ++t) out = kron(out, t < j ? s3 : (t == j ? mid : id));
    return out;
  };
  GammaRep g{dim, eta, {}};
  for (std::size_t j = 0; j < k; ++j) {
    g.gamma.push_back(chain(j, s1));
    g.gamma.push_back(chain(j, s2));
  }
  if (dim % 2 == 1) {
    GaussMatrix last{{one}};
    for (std::size_t t = 0; t < k; ++t) last = kron(last, s3);
    g.gamma.push_back(last);
  }
  for (std::size_t a = 0; a < dim; ++a) {
    if (eta[a] == -1) {
      for (auto& row : g.gamma[a])
        for (auto& e : row) e = i * e;
    } else if (eta[a] != 1) {
      throw GeometryError("signature entries must be +1 or -1");
    }
  }
  return g;
}

GammaRep conjugate(const GammaRep& g, const GaussMatrix& u, const GaussMatrix& u_inv) {
  if (u.size() != g.size() || u_inv.size() != g.size()) throw GeometryError("conjugating matrix has the wrong size");
  GaussMatrix check = gmul(u, u_inv);
  for (std::size_t i = 0; i < check.size(); ++i)
    for (std::size_t j = 0; j < check.size(); ++j)
      if (!(check[i][j] == GaussRational(i == j ? 1 : 0))) throw GeometryError("u_inv is not the inverse of u");
  GammaRep out = g;
  for (auto& m : out.gamma) m = gmul(gmul(u, m), u_inv);
  return out;
}

bool clifford_holds(const GammaRep& g) {
  std::size_t n = g.size();
  for (std::size_t a = 0; a < g.dim; ++a)
    for (std::size_t b = 0; b < g.dim; ++b) {
      GaussMatrix ab = gmul(g.gamma[a], g.gamma[b]);
      GaussMatrix ba = gmul(g.gamma[b], g.gamma[a]);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          GaussRational want(a == b && i == j ? 2 * g.eta[a] : 0);
          if (!(ab[i][j] + ba[i][j] == want)) return false;
        }
    }
  return true;
}

std::vector<Expr> spin_connection(const Frame& f, const Manifold& m) {
  std::size_t n = m.dim();
  const auto& chart = m.chart();
  std::vector<Differentiator> d;
  for (const auto& c : chart.coordinates()) d.emplace_back(c);
  // T^a_{mu nu} = d_mu e^a_nu - Gamma^l_{mu nu} e^a_l
  std::vector<Expr> w(n * n * n);
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<Expr> tn(n);
      for (std::size_t nu = 0; nu < n; ++nu) {
        std::vector<Expr> t{d[mu](f.e[a][nu])};
        for (std::size_t l = 0; l < n; ++l) {
          const Expr& gam = m.christoffel(l, mu, nu);
          if (!gam.is_zero() && !f.e[a][l].is_zero()) t.push_back(-(gam * f.e[a][l]));
        }
        tn[nu] = make_sum(std::move(t));
      }
      for (std::size_t c = 0; c < n; ++c) {
        std::vector<Expr> t;
        for (std::size_t nu = 0; nu < n; ++nu)
          if (!f.inv[c][nu].is_zero() && !tn[nu].is_zero()) t.push_back(f.inv[c][nu] * tn[nu]);
        w[(mu * n + a) * n + c] = simplify(-make_sum(std::move(t)));
      }
    }
  return w;
}

ResidualReport spin_connection_check(const Frame& f, const Manifold& m, const CheckOptions& opt) {
  std::size_t n = m.dim();
  std::vector<Expr> w = spin_connection(f, m);
  std::vector<Differentiator> d;
  for (const auto& c : m.chart().coordinates()) d.emplace_back(c);
  std::vector<Expr> tet, tet_scale, anti, anti_scale;
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t nu = 0; nu < n; ++nu) {
        Expr de = d[mu](f.e[a][nu]);
        std::vector<Expr> gam, om;
        for (std::size_t l = 0; l < n; ++l) gam.push_back(m.christoffel(l, mu, nu) * f.e[a][l]);
        for (std::size_t b = 0; b < n; ++b) om.push_back(w[(mu * n + a) * n + b] * f.e[b][nu]);
        Expr g = make_sum(std::move(gam)), o = make_sum(std::move(om));
        tet.push_back(de - g + o);
        tet_scale.insert(tet_scale.end(), {de, g, o});
      }
  // omega_mu^{ab} = omega_mu^a_c eta^{cb}
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        Expr ab = Expr(f.eta[b]) * w[(mu * n + a) * n + b];
        Expr ba = Expr(f.eta[a]) * w[(mu * n + b) * n + a];
        anti.push_back(ab + ba);
        anti_scale.insert(anti_scale.end(), {ab, ba});
      }
  ResidualReport parts[] = {sampled_residual("tetrad-postulate", m, tet, tet_scale, opt),
                            sampled_residual("antisymmetry", m, anti, anti_scale, opt)};
  return merge_reports("spin-connection", parts);
}

SpinGeometry::SpinGeometry(const Manifold& m, Frame f, GammaRep g)
    : m_(m), frame_(std::move(f)), gamma_(std::move(g)), diff_(std::make_shared<std::vector<Differentiator>>()) {
  std::size_t n = m_.dim();
  if (gamma_.dim != n) throw GeometryError("gamma representation dimension does not match the manifold");
  if (gamma_.eta != frame_.eta) throw GeometryError("gamma and frame signatures differ");
  for (const auto& c : m_.chart().coordinates()) diff_->emplace_back(c);
  std::size_t N = gamma_.size();
  std::vector<SpinMatrix> flat;
  for (const auto& gm : gamma_.gamma) flat.push_back(to_spin(gm));
  for (std::size_t mu = 0; mu < n; ++mu) {
    SpinMatrix s = zero_matrix(N);
    for (std::size_t a = 0; a < n; ++a) accumulate(s, frame_.inv[a][mu], flat[a]);
    gamma_mu_.push_back(simplified(s));
  }
  std::vector<Expr> w = spin_connection(frame_, m_);
  for (std::size_t mu = 0; mu < n; ++mu) {
    SpinMatrix s = zero_matrix(N);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const Expr& c = w[(mu * n + a) * n + b];
        if (c.is_zero()) continue;
        accumulate(s, Expr(Rational(frame_.eta[a], 4)) * c, mmul(flat[a], flat[b]));
      }
    omega_.push_back(simplified(s));
  }
}

SpinGeometry::Operator SpinGeometry::build(const OperatorSpec& spec, const CheckOptions& opt) const {
  std::size_t n = m_.dim(), N = spinor_size();
  Operator op{std::vector<SpinMatrix>(n, zero_matrix(N)), zero_matrix(N)};
  SpinMatrix extra = zero_matrix(N);
  switch (spec.kind) {
    case OperatorKind::StandardDirac:
      for (std::size_t nu = 0; nu < n; ++nu) op.a[nu] = scaled(kI, gamma_mu_[nu]);
      break;
    case OperatorKind::KillingOp: {
      const TensorField& r = spec.payload;
      if (r.rank() != 1 || r.variance(0) != Variance::Up || r.dim() != n)
        throw GeometryError("Killing operator payload must be a vector field");
      if (spec.validate) {
        ResidualReport k = killing_vector_residual(r, m_, opt);
        if (!k.pass) throw GeometryError("payload check failed: not a Killing vector");
      }
      TensorField dr = hidsym::covariant_derivative(lower_index(r, 0, m_), m_);  // [nu][mu] = R_{mu;nu}
      for (std::size_t nu = 0; nu < n; ++nu)
        for (std::size_t i = 0; i < N; ++i) op.a[nu][i][i] = {Expr(), -r[nu]};
      for (std::size_t mu = 0; mu < n; ++mu)
        for (std::size_t nu = 0; nu < n; ++nu) {
          Expr c = simplify(dr.at({nu, mu}));
          if (c.is_zero()) continue;
          accumulate(extra, Expr(Rational(1, 4)) * c, mmul(gamma_mu_[mu], gamma_mu_[nu]));
        }
      extra = scaled(kI, extra);
      break;
    }
    case OperatorKind::DiracType: {
      const TensorField& f = spec.payload;
      if (f.rank() != 2 || !f.all_down() || f.dim() != n)
        throw GeometryError("Dirac-type payload must be a covariant 2-form");
      if (spec.validate) {
        require_antisymmetric(f, m_);
        ResidualReport k = ky_residual(f, m_, opt);
        if (!k.pass) throw GeometryError("payload check failed: not Killing-Yano");
      }
      TensorField mixed = raise_index(f, 1, m_);  // f_mu^nu
      for (std::size_t nu = 0; nu < n; ++nu) {
        SpinMatrix s = zero_matrix(N);
        for (std::size_t mu = 0; mu < n; ++mu) accumulate(s, simplify(mixed.at({mu, nu})), gamma_mu_[mu]);
        op.a[nu] = scaled(kI, s);
      }
      TensorField df = hidsym::covariant_derivative(f, m_);  // [rho][mu][nu]
      std::vector<SpinMatrix> gg(n * n);
      for (std::size_t mu = 0; mu < n; ++mu)
        for (std::size_t nu = 0; nu < n; ++nu) gg[mu * n + nu] = mmul(gamma_mu_[mu], gamma_mu_[nu]);
      for (std::size_t mu = 0; mu < n; ++mu)
        for (std::size_t nu = 0; nu < n; ++nu) {
          SpinMatrix s = zero_matrix(N);
          bool any = false;
          for (std::size_t rho = 0; rho < n; ++rho) {
            Expr c = simplify(df.at({rho, mu, nu}));
            if (c.is_zero()) continue;
            accumulate(s, c, gamma_mu_[rho]);
            any = true;
          }
          if (any) {
            SpinMatrix t = mmul(gg[mu * n + nu], s);
            for (std::size_t i = 0; i < N; ++i)
              for (std::size_t j = 0; j < N; ++j)
                if (!t[i][j].is_zero()) extra[i][j] = extra[i][j] + t[i][j];
          }
        }
      extra = scaled(GaussRational(Rational(0), Rational(-1, 6)), extra);
      break;
    }
  }
  for (std::size_t nu = 0; nu < n; ++nu) {
    SpinMatrix t = mmul(op.a[nu], omega_[nu]);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) op.b[i][j] = op.b[i][j] + t[i][j];
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) op.b[i][j] = csimplify(op.b[i][j] + extra[i][j]);
  for (auto& a : op.a) a = simplified(a);
  return op;
}

SpinorField SpinGeometry::apply(const Operator& op, const SpinorField& psi) const {
  std::size_t n = m_.dim(), N = spinor_size();
  if (psi.size() != N) throw GeometryError("spinor has the wrong number of components");
  std::vector<SpinorField> d(n, SpinorField(N));
  for (std::size_t nu = 0; nu < n; ++nu)
    for (std::size_t j = 0; j < N; ++j) d[nu][j] = {(*diff_)[nu](psi[j].re), (*diff_)[nu](psi[j].im)};
  SpinorField out(N);
  for (std::size_t i = 0; i < N; ++i) {
    std::vector<Expr> re, im;
    auto add = [&](const CExpr& c, const CExpr& v) {
      if (c.is_zero() || v.is_zero()) return;
      CExpr p = c * v;
      re.push_back(p.re);
      im.push_back(p.im);
    };
    for (std::size_t nu = 0; nu < n; ++nu)
      for (std::size_t j = 0; j < N; ++j) add(op.a[nu][i][j], d[nu][j]);
    for (std::size_t j = 0; j < N; ++j) add(op.b[i][j], psi[j]);
    out[i] = {make_sum(std::move(re)), make_sum(std::move(im))};
  }
  return out;
}

SpinorField SpinGeometry::covariant_derivative(std::size_t mu, const SpinorField& psi) const {
  std::size_t N = spinor_size();
  Operator op{std::vector<SpinMatrix>(m_.dim(), zero_matrix(N)), omega_.at(mu)};
  for (std::size_t i = 0; i < N; ++i) op.a[mu][i][i] = {Expr(1), Expr()};
  return apply(op, psi);
}

std::vector<SpinorField> spinor_bank(const Manifold& m, std::size_t spinor_size, std::size_t count,
                                     std::uint64_t seed) {
  const auto& coords = m.chart().coordinates();
  std::size_t n = coords.size();
  std::size_t theta = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (coords[i] == "theta") theta = i;
  Expr th = Expr::coord(coords[theta]);
  std::array<Expr, 3> trig{Expr(1), sin(th), cos(th)};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-3, 3), var(0, static_cast<int>(n)), tri(0, 2);
  auto poly_term = [&]() {
    Expr t(1);
    for (int k = 0; k < 2; ++k) {
      int v = var(rng);
      if (v < static_cast<int>(n)) t = t * Expr::coord(coords[static_cast<std::size_t>(v)]);
    }
    return t * trig[static_cast<std::size_t>(tri(rng))];
  };
  auto part = [&]() {
    std::vector<Expr> terms;
    for (int k = 0; k < 3; ++k) {
      int c = coef(rng);
      if (c == 0) c = 1;
      terms.push_back(Expr(c) * poly_term());
    }
    return make_sum(std::move(terms));
  };
  std::vector<SpinorField> bank;
  for (std::size_t k = 0; k < count; ++k) {
    SpinorField psi(spinor_size);
    for (auto& c : psi) c = {part(), part()};
    bank.push_back(std::move(psi));
  }
  return bank;
}

SpinorField transform(const GaussMatrix& u, const SpinorField& psi) {
  if (u.size() != psi.size()) throw GeometryError("matrix and spinor sizes differ");
  SpinorField out(psi.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::vector<Expr> re, im;
    for (std::size_t j = 0; j < u.size(); ++j) {
      if (u[i][j].is_zero()) continue;
      CExpr p = u[i][j] * psi[j];
      re.push_back(p.re);
      im.push_back(p.im);
    }
    out[i] = {make_sum(std::move(re)), make_sum(std::move(im))};
  }
  return out;
}

ResidualReport anticommutator_residual(const SpinGeometry& sg, const OperatorSpec& a, const OperatorSpec& b,
                                       const std::vector<SpinorField>& bank, const CheckOptions& opt) {
  auto A = sg.build(a, opt), B = sg.build(b, opt);
  std::vector<SpinorField> ab, ba;
  for (const auto& psi : bank) {
    ab.push_back(sg.apply(A, sg.apply(B, psi)));
    ba.push_back(sg.apply(B, sg.apply(A, psi)));
  }
  return pair_residual("anticommutator", sg, ab, ba, 1.0, opt);
}

ResidualReport commutator_residual(const SpinGeometry& sg, const OperatorSpec& a, const OperatorSpec& b,
                                   const std::vector<SpinorField>& bank, const CheckOptions& opt) {
  auto A = sg.build(a, opt), B = sg.build(b, opt);
  std::vector<SpinorField> ab, ba;
  for (const auto& psi : bank) {
    ab.push_back(sg.apply(A, sg.apply(B, psi)));
    ba.push_back(sg.apply(B, sg.apply(A, psi)));
  }
  return pair_residual("commutator", sg, ab, ba, -1.0, opt);
}

ResidualReport square_compare(const SpinGeometry& sg, const OperatorSpec& f, const std::vector<SpinorField>& bank,
                              const CheckOptions& opt) {
  if (f.kind != OperatorKind::DiracType) throw GeometryError("square_compare needs a Dirac-type operator");
  auto F = sg.build(f, opt), S = sg.build(OperatorSpec{}, opt);
  std::vector<SpinorField> ff, ss;
  for (const auto& psi : bank) {
    ff.push_back(sg.apply(F, sg.apply(F, psi)));
    ss.push_back(sg.apply(S, sg.apply(S, psi)));
  }
  return pair_residual("square-compare", sg, ff, ss, -1.0, opt);
}

std::vector<std::pair<double, double>> evaluate_spinor(const Manifold& m, const SpinorField& psi,
                                                       std::span<const double> x) {
  std::vector<double> v = m.compile(flatten(psi))(x);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < v.size(); i += 2) out.emplace_back(v[i], v[i + 1]);
  return out;
}

}  // namespace hidsym
