#include "hidsym/catalog.hpp"

#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hidsym/killing.hpp"
#include "hidsym/sasaki.hpp"
#include "hidsym/spin.hpp"
#include "hidsym/simplify.hpp"

namespace hidsym {

namespace {

constexpr double kPi = std::numbers::pi;

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

TensorField vec(const std::set<std::string>& coords, std::initializer_list<const char*> comps) {
  std::vector<Expr> v;
  for (const char* c : comps) v.push_back(parse(c, coords));
  return TensorField::vector(std::move(v));
}

TensorField mixed(const std::set<std::string>& coords, std::initializer_list<std::initializer_list<const char*>> rows) {
  std::size_t n = rows.size();
  TensorField t(n, {Variance::Up, Variance::Down});
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (const char* c : row) t.at({i, j++}) = parse(c, coords);
    ++i;
  }
  return t;
}

void expect(CatalogEntry& e, std::string check, std::string target, bool pass,
            std::optional<ComponentExpectation> comp = std::nullopt) {
  e.manifest.push_back(ManifestItem{std::move(check), std::move(target), pass, std::move(comp)});
}

bool is_structure_check(const std::string& c) {
  for (const char* k : {"structure", "sasakian", "killing-triple", "curvature", "sectional", "einstein",
                        "para-hyperkahler", "cone-ricci-flat", "cone-round-trip", "witness"})
    if (c == k) return true;
  return false;
}

const TensorField& lookup(const std::map<std::string, TensorField>& m, const std::string& name, const char* what) {
  auto it = m.find(name);
  if (it == m.end()) throw std::invalid_argument(std::string("unknown ") + what + " '" + name + "'");
  return it->second;
}

const TensorField& any_target(const CatalogEntry& e, const std::string& name) {
  for (const auto* m : {&e.forms, &e.tensors, &e.vectors})
    if (auto it = m->find(name); it != m->end()) return it->second;
  throw std::invalid_argument("unknown target '" + name + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

CatalogEntry taub_nut(double mass) {
  if (!(mass > 0.0)) throw std::invalid_argument("Taub-NUT needs m > 0");
  std::vector<std::string> names{"r", "theta", "phi", "chi"};
  std::set<std::string> C(names.begin(), names.end());
  auto P = [&](const char* s) { return parse(s, C); };
  Chart chart(names, {{0.5, 10.0}, {0.2, kPi - 0.2}, {0.1, 2 * kPi - 0.1}, {0.1, 4 * kPi - 0.1}});

  Expr V = P("1 + 4*m/r");
  // Cartesian differentials dx_i = d(r n_i) in the spherical chart.
  std::vector<Expr> X{P("r*sin(theta)*cos(phi)"), P("r*sin(theta)*sin(phi)"), P("r*cos(theta)")};
  std::vector<std::vector<Expr>> dx(3, std::vector<Expr>(4));
  for (int i = 0; i < 3; ++i)
    for (int mu = 0; mu < 4; ++mu) dx[i][mu] = simplify(differentiate(X[i], names[mu]));
  // sigma = d chi + cos(theta) d phi, so that dx^4 + A = -4m sigma in the north gauge.
  std::vector<Expr> sigma{Expr(), Expr(), P("cos(theta)"), Expr(1)};

  Matrix g(4, std::vector<Expr>(4));
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      std::vector<Expr> t;
      for (int i = 0; i < 3; ++i) t.push_back(V * dx[i][a] * dx[i][b]);
      t.push_back(P("16*m^2") / V * sigma[a] * sigma[b]);
      g[a][b] = simplify(make_sum(std::move(t)));
    }
  Manifold M("taub-nut", chart, g, {{"m", mass}}, {1, 1, 1, 1});

  CatalogEntry e{"taub-nut", M, {}, {}, {}, {}, std::nullopt, std::nullopt, {}, {}};
  e.scalars["f"] = P("(4*m + r)/r");
  e.scalars["g"] = P("r/(4*m + r)");
  e.scalars["V"] = V;

  // Rotations with [R_i, R_j] = eps_ijk R_k, and the U(1) generator.
  e.vectors["R1"] = vec(C, {"0", "sin(phi)", "cos(phi)*cos(theta)/sin(theta)", "-cos(phi)/sin(theta)"});
  e.vectors["R2"] = vec(C, {"0", "-cos(phi)", "sin(phi)*cos(theta)/sin(theta)", "-sin(phi)/sin(theta)"});
  e.vectors["R3"] = vec(C, {"0", "0", "-1", "0"});
  e.vectors["dchi"] = vec(C, {"0", "0", "0", "1"});
  e.vectors["r_dr"] = vec(C, {"r", "0", "0", "0"});

  // Forms as printed are read with f = f_{mu nu} dx^mu ^ dx^nu summed over all
  // ordered pairs; the *_raw entries use the usual half-sum convention.
  Expr eight_m = P("8*m");
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    TensorField f(4, {Variance::Down, Variance::Down}, Symmetry::Antisymmetric);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) {
        Expr s = eight_m * (sigma[a] * dx[i][b] - sigma[b] * dx[i][a]) -
                 Expr(2) * V * (dx[j][a] * dx[k][b] - dx[j][b] * dx[k][a]);
        f.at({a, b}) = simplify(s);
      }
    std::string name = "f" + std::to_string(i + 1);
    e.forms[name + "_raw"] = f;
    e.forms[name] = simplified(Expr(Rational(-1, 2)) * f);
  }
  TensorField fy = TensorField::form(4, 2,
                                     {{{0, 2}, P("-8*m*cos(theta)")},
                                      {{0, 3}, P("-8*m")},
                                      {{1, 2}, P("4*r*(r + 2*m)*(1 + r/(4*m))*sin(theta)")}});
  e.forms["fY_raw"] = fy;
  e.forms["fY"] = simplified(Expr(Rational(1, 2)) * fy);
  e.tensors["g"] = M.metric_tensor();
  e.tensors["K_Y"] = associated_sk(e.forms["fY"], M);

  Expr sv = sqrt(V);
  e.frame = Matrix{{sv, Expr(), Expr(), Expr()},
                   {Expr(), sv * P("r"), Expr(), Expr()},
                   {Expr(), Expr(), sv * P("r*sin(theta)"), Expr()},
                   {Expr(), Expr(), P("4*m*cos(theta)") / sv, P("4*m") / sv}};

  e.metadata["gauge"] = "north: A = 4m(1 - cos(theta)) dphi, x4 = -4m(chi + phi)";
  e.metadata["nut_period"] = "16*pi*m";
  e.metadata["fi_normalization"] = "-2";
  e.metadata["fi_unit_root_scale_raw"] = "4";
  e.metadata["fY_normalization"] = "2";
  e.metadata["form_convention"] = "stored f = raw / normalization";
  e.metadata["m"] = format_double(mass);

  for (const char* v : {"R1", "R2", "R3", "dchi"}) expect(e, "killing-vector", v, true);
  expect(e, "killing-vector", "r_dr", false);
  for (const char* f : {"f1", "f2", "f3"}) {
    expect(e, "ky", f, true);
    expect(e, "cky", f, true);
    expect(e, "covconst", f, true);
    expect(e, "unit-root", f, true);
  }
  expect(e, "unit-root", "f1_raw", false);
  expect(e, "quaternion", "f1,f2,f3", true);
  expect(e, "ky", "fY", true);
  expect(e, "cky", "fY", true);
  expect(e, "covconst", "fY", false, ComponentExpectation{{2, 0, 1}, P("2*(1 + r/(4*m))*r*sin(theta)")});
  expect(e, "unit-root", "fY", false);
  expect(e, "sk", "K_Y", true);
  expect(e, "sk", "g", true);
  for (const char* f : {"f1", "f2", "f3", "fY"}) expect(e, "spin-anticommute", f, true);
  for (const char* f : {"f1", "f2", "f3"}) expect(e, "spin-square", f, true);
  expect(e, "spin-square", "fY", false);
  for (const char* v : {"R1", "R2", "R3", "dchi"}) expect(e, "spin-commute", v, true);
  expect(e, "spin-commute", "r_dr", false);
  return e;
}

CatalogEntry flat(std::size_t n, std::vector<int> signature) {
  if (n < 2) throw std::invalid_argument("flat space needs n >= 2");
  if (signature.empty()) signature.assign(n, 1);
  if (signature.size() != n) throw std::invalid_argument("signature length must equal n");
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
  std::set<std::string> C(names.begin(), names.end());
  Chart chart(names, std::vector<Interval>(n, Interval{-2.0, 2.0}));
  Matrix g(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) g[i][i] = Expr(signature[i]);
  bool euclidean = true;
  std::string name = "flat" + std::to_string(n);
  for (int s : signature) {
    if (s != 1 && s != -1) throw std::invalid_argument("signature entries must be +1 or -1");
    euclidean = euclidean && s == 1;
  }
  if (!euclidean) {
    std::size_t p = 0;
    for (int s : signature) p += s > 0;
    name = "flat" + std::to_string(p) + "," + std::to_string(n - p);
  }
  Manifold M(name, chart, g, {}, signature);
  CatalogEntry e{name, M, {}, {}, {}, {}, std::nullopt, std::nullopt, {}, {}};
  std::vector<Expr> x;
  for (const auto& c : names) x.push_back(parse(c, C));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Expr> t(n);
    t[i] = Expr(1);
    e.vectors["T" + std::to_string(i + 1)] = TensorField::vector(t);
    expect(e, "killing-vector", "T" + std::to_string(i + 1), true);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<Expr> t(n);
      t[i] = Expr(signature[j]) * x[j];
      t[j] = -(Expr(signature[i]) * x[i]);
      std::string k = "R" + std::to_string(i + 1) + std::to_string(j + 1);
      e.vectors[k] = TensorField::vector(t);
      expect(e, "killing-vector", k, true);
    }
  e.vectors["dilation"] = TensorField::vector(x);
  expect(e, "killing-vector", "dilation", false);

  e.tensors["g"] = M.metric_tensor();
  expect(e, "sk", "g", true);
  Matrix kx(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) kx[i][i] = x[0];
  e.tensors["x1_delta"] = TensorField::covariant2(kx, Symmetry::Symmetric);
  expect(e, "sk", "x1_delta", false);
  // Constant rank-one S-K tensor: no antisymmetric square root of rank >= 2.
  Matrix k1(n, std::vector<Expr>(n));
  k1[0][0] = Expr(1);
  e.tensors["dx1_dx1"] = TensorField::covariant2(k1, Symmetry::Symmetric);
  expect(e, "sk", "dx1_dx1", true);

  e.frame = Matrix(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) (*e.frame)[i][i] = Expr(1);

  if (n == 2) {
    e.forms["vol"] = TensorField::form(2, 2, {{{0, 1}, Expr(1)}});
  }
  if (n >= 3) {
    e.forms["x1_dx2dx3"] = TensorField::form(n, 2, {{{1, 2}, x[0]}});
    expect(e, "ky", "x1_dx2dx3", false);
  }
  if (n == 4 && euclidean) {
    e.forms["J1"] = TensorField::form(4, 2, {{{0, 1}, Expr(1)}, {{2, 3}, Expr(1)}});
    e.forms["J2"] = TensorField::form(4, 2, {{{0, 2}, Expr(1)}, {{1, 3}, Expr(-1)}});
    e.forms["J3"] = TensorField::form(4, 2, {{{0, 3}, Expr(1)}, {{1, 2}, Expr(1)}});
    for (const char* f : {"J1", "J2", "J3"}) {
      expect(e, "ky", f, true);
      expect(e, "covconst", f, true);
      expect(e, "unit-root", f, true);
    }
    expect(e, "quaternion", "J1,J2,J3", true);
    expect(e, "quaternion", "J1,J1,J1", false);
  }
  return e;
}

CatalogEntry sphere2() {
  std::vector<std::string> names{"theta", "phi"};
  std::set<std::string> C(names.begin(), names.end());
  Chart chart(names, {{0.2, kPi - 0.2}, {0.1, 2 * kPi - 0.1}});
  Matrix g{{Expr(1), Expr()}, {Expr(), parse("sin(theta)^2", C)}};
  Manifold M("sphere2", chart, g, {}, {1, 1});
  CatalogEntry e{"sphere2", M, {}, {}, {}, {}, std::nullopt, std::nullopt, {}, {}};
  e.vectors["L1"] = vec(C, {"-sin(phi)", "-cos(phi)*cos(theta)/sin(theta)"});
  e.vectors["L2"] = vec(C, {"cos(phi)", "-sin(phi)*cos(theta)/sin(theta)"});
  e.vectors["L3"] = vec(C, {"0", "1"});
  for (const char* v : {"L1", "L2", "L3"}) expect(e, "killing-vector", v, true);
  e.forms["vol"] = TensorField::form(2, 2, {{{0, 1}, parse("sin(theta)", C)}});
  expect(e, "ky", "vol", true);
  expect(e, "covconst", "vol", true);
  expect(e, "unit-root", "vol", true);
  e.tensors["g"] = M.metric_tensor();
  expect(e, "sk", "g", true);
  e.frame = Matrix{{Expr(1), Expr()}, {Expr(), parse("sin(theta)", C)}};
  return e;
}

CatalogEntry pseudo_sphere_fixture() {
  std::vector<std::string> names{"u", "a", "b"};
  std::set<std::string> C(names.begin(), names.end());
  auto P = [&](const char* s) { return parse(s, C); };
  Chart chart(names, {{0.2, 3.0}, {0.1, 2 * kPi - 0.1}, {0.1, 2 * kPi - 0.1}});
  Matrix g{{P("-1/(1 + u^2)"), Expr(), Expr()}, {Expr(), P("1 + u^2"), Expr()}, {Expr(), Expr(), P("-u^2")}};
  Manifold M("pseudo-sphere", chart, g, {}, {-1, 1, -1});
  CatalogEntry e{"pseudo-sphere", M, {}, {}, {}, {}, std::nullopt, std::nullopt, {}, {}};

  // x = (sqrt(1+u^2) cos a, sqrt(1+u^2) sin a, u cos b, u sin b) in R^{2,2};
  // xi_a = J_a x, phi_a = tangential part of J_a, with J1 complex, J2 and J3
  // para-complex and J3 = -J1 J2.
  MixedThreeStructure s;
  s.xi[0] = vec(C, {"0", "1", "1"});
  s.xi[1] = vec(C, {"sqrt(u^2 + 1)*cos(a + b)", "-u*sin(a + b)/sqrt(u^2 + 1)", "-sqrt(u^2 + 1)*sin(a + b)/u"});
  s.xi[2] = vec(C, {"-sqrt(u^2 + 1)*sin(a + b)", "-u*cos(a + b)/sqrt(u^2 + 1)", "-sqrt(u^2 + 1)*cos(a + b)/u"});
  s.phi[0] = mixed(C, {{"0", "u^3 + u", "-u^3 - u"}, {"u/(u^2 + 1)", "0", "0"}, {"1/u", "0", "0"}});
  s.phi[1] = mixed(C, {{"0", "-(u^2 + 1)^(3/2)*sin(a + b)", "u^2*sqrt(u^2 + 1)*sin(a + b)"},
                       {"-sin(a + b)/sqrt(u^2 + 1)", "0", "-u*cos(a + b)/sqrt(u^2 + 1)"},
                       {"-sin(a + b)/sqrt(u^2 + 1)", "-sqrt(u^2 + 1)*cos(a + b)/u", "0"}});
  s.phi[2] = mixed(C, {{"0", "-(u^2 + 1)^(3/2)*cos(a + b)", "u^2*sqrt(u^2 + 1)*cos(a + b)"},
                       {"-cos(a + b)/sqrt(u^2 + 1)", "0", "u*sin(a + b)/sqrt(u^2 + 1)"},
                       {"-cos(a + b)/sqrt(u^2 + 1)", "sqrt(u^2 + 1)*sin(a + b)/u", "0"}});
  for (int a = 0; a < 3; ++a) {
    s.eta[a] = simplified(lower_index(s.xi[a], 0, M));
    std::string k = std::to_string(a + 1);
    e.vectors["xi" + k] = s.xi[a];
    e.forms["eta" + k] = s.eta[a];
    e.forms["deta" + k] = simplified(exterior_derivative(s.eta[a], chart));
    TensorField phi_flat = simplified(lower_index(s.phi[a], 0, M));
    phi_flat.set_symmetry(Symmetry::Antisymmetric);
    e.forms["phi" + k] = phi_flat;
    expect(e, "killing-vector", "xi" + k, true);
    expect(e, "ky", "eta" + k, true);
    expect(e, "cky", "eta" + k, true);
    expect(e, "cky", "deta" + k, true);
    expect(e, "ky", "phi" + k, false);
  }
  e.tensors["g"] = M.metric_tensor();
  expect(e, "sk", "g", true);
  e.structure = s;
  e.frame = Matrix{{P("1/sqrt(1 + u^2)"), Expr(), Expr()}, {Expr(), P("sqrt(1 + u^2)"), Expr()}, {Expr(), Expr(), P("u")}};
  e.metadata["ambient"] = "R^{2,2}, metric diag(1, 1, -1, -1), <x, x> = 1";
  e.metadata["structure"] = "xi_a = J_a x, phi_a = tangential J_a, J3 = -J1 J2";
  e.metadata["einstein_constant"] = "2";
  // The alpha = 1 Sasakian condition, phi_1 = -nabla xi_1 and the literal
  // reverse-cone round trip disagree in sign with the rest of the structure.
  expect(e, "structure", "structure", true);
  expect(e, "sasakian", "structure", false);
  expect(e, "killing-triple", "structure", false);
  expect(e, "curvature", "structure", true);
  expect(e, "sectional", "structure", true);
  expect(e, "einstein", "2", true);
  expect(e, "para-hyperkahler", "structure", true);
  expect(e, "cone-ricci-flat", "structure", true);
  expect(e, "cone-round-trip", "structure", false);
  expect(e, "witness", "structure", true);
  return e;
}

std::vector<std::string> catalog_names() {
  return {"taub-nut", "flat2", "flat3", "flat4", "minkowski4", "flat2,2", "sphere2", "pseudo-sphere"};
}

CatalogEntry catalog_entry(const std::string& name, const ParamEnv& params) {
  if (name == "taub-nut") {
    double m = 1.0;
    if (auto it = params.find("m"); it != params.end()) m = it->second;
    return taub_nut(m);
  }
  if (name == "sphere2") return sphere2();
  if (name == "pseudo-sphere") return pseudo_sphere_fixture();
  auto digits = [](const std::string& s) {
    if (s.empty() || s.size() > 2) throw std::invalid_argument("bad dimension in catalog name");
    for (char c : s)
      if (c < '0' || c > '9') throw std::invalid_argument("bad dimension in catalog name");
    return static_cast<std::size_t>(std::stoul(s));
  };
  if (name.rfind("minkowski", 0) == 0) {
    std::size_t n = digits(name.substr(9));
    std::vector<int> sig(n, 1);
    sig[0] = -1;
    return flat(n, sig);
  }
  if (name.rfind("flat", 0) == 0) {
    auto parts = split(name.substr(4), ',');
    if (parts.size() == 1) return flat(digits(parts[0]));
    if (parts.size() == 2) {
      std::size_t p = digits(parts[0]), q = digits(parts[1]);
      std::vector<int> sig(p, 1);
      sig.insert(sig.end(), q, -1);
      return flat(p + q, sig);
    }
  }
  throw std::invalid_argument("unknown catalog entry '" + name + "'");
}

ResidualReport run_check(const CatalogEntry& e, const std::string& check, const std::string& target,
                         const CheckOptions& opt) {
  const Manifold& M = e.manifold;
  ResidualReport r;
  if (check == "killing-vector") {
    r = killing_vector_residual(lookup(e.vectors, target, "vector field"), M, opt);
  } else if (check == "conformal-killing") {
    auto cf = conformal_killing_factor(lookup(e.vectors, target, "vector field"), M, opt);
    r = cf.report;
  } else if (check == "ky") {
    r = ky_residual(lookup(e.forms, target, "form"), M, opt);
  } else if (check == "cky") {
    r = cky_residual(lookup(e.forms, target, "form"), M, opt);
  } else if (check == "sk") {
    r = sk_residual(lookup(e.tensors, target, "tensor"), M, opt);
  } else if (check == "covconst") {
    r = covariant_constancy_residual(any_target(e, target), M, opt);
  } else if (check == "unit-root") {
    auto u = unit_root_check(lookup(e.forms, target, "form"), M, opt);
    r = u.strict;
    r.extra["fitted.max_relative_residual"] = u.fitted.max_rel;
    r.extra["fitted.pass"] = u.fitted.pass ? 1.0 : 0.0;
  } else if (check == "quaternion") {
    auto names = split(target, ',');
    if (names.size() != 3) throw std::invalid_argument("quaternion target needs three comma-separated forms");
    r = quaternion_relations_check(lookup(e.forms, names[0], "form"), lookup(e.forms, names[1], "form"),
                                   lookup(e.forms, names[2], "form"), M, opt);
  } else if (check.rfind("spin-", 0) == 0) {
    Frame F = e.frame ? orthonormal_frame(M, *e.frame, M.signature()) : orthonormal_frame(M);
    SpinGeometry sg(M, F, gamma_matrices(M.dim(), F.eta));
    auto bank = spinor_bank(M, sg.spinor_size(), 5, opt.seed);
    OperatorSpec ds{};
    if (check == "spin-anticommute") {
      r = anticommutator_residual(sg, ds, {OperatorKind::DiracType, lookup(e.forms, target, "form"), false}, bank, opt);
    } else if (check == "spin-square") {
      r = square_compare(sg, {OperatorKind::DiracType, lookup(e.forms, target, "form"), false}, bank, opt);
    } else if (check == "spin-commute") {
      r = commutator_residual(sg, ds, {OperatorKind::KillingOp, lookup(e.vectors, target, "vector field"), false}, bank,
                              opt);
    } else {
      throw std::invalid_argument("unknown check '" + check + "'");
    }
  } else if (is_structure_check(check)) {
    if (!e.structure) throw std::invalid_argument("entry '" + e.name + "' has no mixed 3-structure");
    const auto& S = *e.structure;
    if (check == "structure") {
      r = structure_identity_suite(M, S, opt);
    } else if (check == "sasakian") {
      r = sasakian_residuals(M, S, opt);
    } else if (check == "killing-triple") {
      r = killing_triple_check(M, S, opt);
    } else if (check == "curvature") {
      r = curvature_characterization(M, S, opt);
    } else if (check == "sectional") {
      r = sectional_curvature_check(M, S, opt);
    } else if (check == "einstein") {
      Expr lam = simplify(parse(target));
      if (!lam.is_const()) throw std::invalid_argument("einstein target must be a rational constant");
      r = einstein_check(M, lam.value(), opt);
    } else if (check == "witness") {
      r = phi_not_killing_witness(M, S, opt).report;
    } else {
      ConeManifold c = build_cone(M, S);
      if (check == "para-hyperkahler") r = para_hyperkahler_check(c, opt);
      else if (check == "cone-ricci-flat") r = einstein_check(c.cone, Rational(0), opt);
      else r = cone_round_trip(c, M, S, opt);
    }
  } else {
    throw std::invalid_argument("unknown check '" + check + "'");
  }
  return r;
}

ResidualReport run_manifest_item(const CatalogEntry& e, const ManifestItem& item, const CheckOptions& opt) {
  ResidualReport r = run_check(e, item.check, item.target, opt);
  bool met = r.pass == item.expect_pass;
  if (item.component) {
    ResidualReport c = covariant_derivative_component_check(any_target(e, item.target), item.component->index,
                                                            item.component->value, e.manifold, opt);
    r.extra["closed_form.max_relative_residual"] = c.max_rel;
    r.extra["closed_form.pass"] = c.pass ? 1.0 : 0.0;
    met = met && c.pass;
  }
  r.extra["expected_pass"] = item.expect_pass ? 1.0 : 0.0;
  r.extra["expectation_met"] = met ? 1.0 : 0.0;
  return r;
}

std::optional<bool> expected_outcome(const CatalogEntry& e, const std::string& check, const std::string& target) {
  for (const auto& item : e.manifest)
    if (item.check == check && item.target == target) return item.expect_pass;
  return std::nullopt;
}

}  // namespace hidsym
