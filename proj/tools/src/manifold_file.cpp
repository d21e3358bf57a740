#include "hidsym_cli/manifold_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hidsym/simplify.hpp"

namespace hidsym::cli {

using nlohmann::json;

namespace {

Expr parse_expr(const json& j, const std::set<std::string>& coords, const std::string& where) {
  if (!j.is_string()) throw InputError(where + ": expected an expression string");
  try {
    return parse(j.get<std::string>(), coords);
  } catch (const ParseError& e) {
    throw InputError(where + ": " + e.what());
  }
}

std::string expr_string(const Expr& e) { return to_string(e); }

bool increasing(const Index& idx) {
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (idx[i] <= idx[i - 1]) return false;
  return true;
}

std::string variance_string(const TensorField& t) {
  std::string s;
  for (Variance v : t.slots()) s += v == Variance::Up ? 'u' : 'd';
  return s;
}

std::string symmetry_string(Symmetry s) {
  switch (s) {
    case Symmetry::Symmetric: return "symmetric";
    case Symmetry::Antisymmetric: return "antisymmetric";
    default: return "none";
  }
}

Symmetry parse_symmetry(const std::string& s) {
  if (s == "symmetric") return Symmetry::Symmetric;
  if (s == "antisymmetric") return Symmetry::Antisymmetric;
  if (s == "none") return Symmetry::None;
  throw InputError("unknown symmetry '" + s + "'");
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& e : row) r.push_back(expr_string(e));
    out.push_back(r);
  }
  return out;
}

Matrix parse_matrix(const json& j, std::size_t n, const std::set<std::string>& coords, const std::string& where) {
  if (!j.is_array() || j.size() != n) throw InputError(where + ": expected " + std::to_string(n) + " rows");
  Matrix m(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) throw InputError(where + ": row " + std::to_string(i) + " has wrong length");
    for (std::size_t k = 0; k < n; ++k) m[i][k] = parse_expr(j[i][k], coords, where);
  }
  return m;
}

std::vector<Expr> parse_list(const json& j, std::size_t n, const std::set<std::string>& coords, const std::string& where) {
  if (!j.is_array() || j.size() != n) throw InputError(where + ": expected " + std::to_string(n) + " entries");
  std::vector<Expr> v;
  for (const auto& e : j) v.push_back(parse_expr(e, coords, where));
  return v;
}

json vector_json(const TensorField& t) {
  json out = json::array();
  for (const auto& e : t.components()) out.push_back(expr_string(e));
  return out;
}

json mixed_json(const TensorField& t) {
  std::size_t n = t.dim();
  Matrix m(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = t.at({i, j});
  return matrix_json(m);
}

}  // namespace

Index parse_index(const std::string& s, std::size_t dim) {
  Index idx;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw InputError("bad index tuple '" + s + "'");
    std::size_t v = std::stoul(part);
    if (v >= dim) throw InputError("index " + part + " out of range in '" + s + "'");
    idx.push_back(v);
  }
  if (idx.empty()) throw InputError("empty index tuple");
  return idx;
}

std::string index_string(const Index& idx) {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(idx[i]);
  }
  return s;
}

CatalogEntry entry_from_json(const json& doc, const ParamEnv& overrides) {
  if (!doc.is_object()) throw InputError("manifold file must be a JSON object");
  for (const char* key : {"name", "dimension", "coordinates", "domain", "metric"})
    if (!doc.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  std::string name = doc["name"].get<std::string>();
  auto n = doc["dimension"].get<std::size_t>();
  auto coords = doc["coordinates"].get<std::vector<std::string>>();
  if (coords.size() != n) throw InputError("coordinates do not match dimension");
  std::set<std::string> C(coords.begin(), coords.end());
  if (C.size() != n) throw InputError("duplicate coordinate names");
  std::vector<Interval> box;
  for (const auto& c : coords) {
    if (!doc["domain"].contains(c)) throw InputError("domain missing for coordinate '" + c + "'");
    auto lohi = doc["domain"][c].get<std::vector<double>>();
    if (lohi.size() != 2 || !(lohi[0] < lohi[1])) throw InputError("bad domain for '" + c + "'");
    box.push_back({lohi[0], lohi[1]});
  }
  std::vector<int> sig(n, 1);
  if (doc.contains("signature")) sig = doc["signature"].get<std::vector<int>>();
  if (sig.size() != n) throw InputError("signature length does not match dimension");
  ParamEnv params;
  if (doc.contains("parameters")) params = doc["parameters"].get<ParamEnv>();
  for (const auto& [k, v] : overrides) params[k] = v;

  Matrix g = parse_matrix(doc["metric"], n, C, "metric");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!simplify(g[i][j] - g[j][i]).is_zero()) throw InputError("metric is not symmetric");
  auto check_params = [&](const Expr& e, const std::string& where) {
    for (const auto& p : free_parameters(e))
      if (!params.count(p)) throw InputError(where + ": unbound name '" + p + "'");
  };
  for (const auto& row : g)
    for (const auto& e : row) check_params(e, "metric");

  Manifold M(name, Chart(coords, box), g, params, sig);
  CatalogEntry e{name, M, {}, {}, {}, {}, std::nullopt, std::nullopt, {}, {}};

  if (doc.contains("vectors"))
    for (const auto& [k, v] : doc["vectors"].items()) {
      auto comps = parse_list(v, n, C, "vector " + k);
      for (const auto& c : comps) check_params(c, "vector " + k);
      e.vectors[k] = TensorField::vector(std::move(comps));
    }
  if (doc.contains("forms"))
    for (const auto& [k, v] : doc["forms"].items()) {
      auto p = v.at("rank").get<std::size_t>();
      if (p == 0 || p > n) throw InputError("form " + k + ": rank out of range");
      std::map<Index, Expr> comps;
      for (const auto& [idx, val] : v.at("components").items()) {
        Index ix = parse_index(idx, n);
        if (ix.size() != p) throw InputError("form " + k + ": index '" + idx + "' has wrong length");
        if (!increasing(ix)) throw InputError("form " + k + ": index '" + idx + "' is not strictly increasing");
        comps[ix] = parse_expr(val, C, "form " + k);
        check_params(comps[ix], "form " + k);
      }
      e.forms[k] = TensorField::form(n, p, comps);
    }
  if (doc.contains("tensors"))
    for (const auto& [k, v] : doc["tensors"].items()) {
      std::string var = v.at("variance").get<std::string>();
      std::vector<Variance> slots;
      for (char c : var) {
        if (c != 'u' && c != 'd') throw InputError("tensor " + k + ": variance must use u/d");
        slots.push_back(c == 'u' ? Variance::Up : Variance::Down);
      }
      if (slots.empty()) throw InputError("tensor " + k + ": empty variance");
      TensorField t(n, slots, parse_symmetry(v.value("symmetry", "none")));
      for (const auto& [idx, val] : v.at("components").items()) {
        Index ix = parse_index(idx, n);
        if (ix.size() != slots.size()) throw InputError("tensor " + k + ": index '" + idx + "' has wrong length");
        t.at(ix) = parse_expr(val, C, "tensor " + k);
        check_params(t.at(ix), "tensor " + k);
      }
      e.tensors[k] = t;
    }
  if (doc.contains("scalars"))
    for (const auto& [k, v] : doc["scalars"].items()) e.scalars[k] = parse_expr(v, C, "scalar " + k);
  if (doc.contains("frame")) e.frame = parse_matrix(doc["frame"], n, C, "frame");
  if (doc.contains("structures")) {
    const auto& s = doc["structures"];
    MixedThreeStructure st;
    for (std::size_t a = 0; a < 3; ++a) {
      std::string w = "structures[" + std::to_string(a) + "]";
      Matrix phi = parse_matrix(s.at("phi").at(a), n, C, w + ".phi");
      TensorField t(n, {Variance::Up, Variance::Down});
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) t.at({i, j}) = phi[i][j];
      st.phi[a] = t;
      st.xi[a] = TensorField::vector(parse_list(s.at("xi").at(a), n, C, w + ".xi"));
      st.eta[a] = TensorField::one_form(parse_list(s.at("eta").at(a), n, C, w + ".eta"));
    }
    if (s.contains("eps")) {
      auto eps = s["eps"].get<std::vector<int>>();
      if (eps.size() != 3) throw InputError("structures.eps needs three entries");
      st.eps = {eps[0], eps[1], eps[2]};
    }
    e.structure = st;
  }
  if (doc.contains("manifest"))
    for (const auto& item : doc["manifest"]) {
      ManifestItem m{item.at("check").get<std::string>(), item.at("target").get<std::string>(),
                     item.value("expect_pass", true), std::nullopt};
      if (item.contains("component"))
        m.component = ComponentExpectation{parse_index(item["component"].at("index").get<std::string>(), n),
                                           parse_expr(item["component"].at("value"), C, "manifest component")};
      e.manifest.push_back(std::move(m));
    }
  if (doc.contains("metadata")) e.metadata = doc["metadata"].get<std::map<std::string, std::string>>();
  return e;
}

json entry_to_json(const CatalogEntry& e) {
  const Manifold& M = e.manifold;
  std::size_t n = M.dim();
  json doc;
  doc["name"] = e.name;
  doc["dimension"] = n;
  doc["coordinates"] = M.chart().coordinates();
  json dom = json::object();
  for (std::size_t i = 0; i < n; ++i) dom[M.chart().coordinates()[i]] = {M.chart().box()[i].lo, M.chart().box()[i].hi};
  doc["domain"] = dom;
  doc["signature"] = M.signature();
  doc["parameters"] = M.params();
  doc["metric"] = matrix_json(M.metric());
  json vec = json::object();
  for (const auto& [k, v] : e.vectors) vec[k] = vector_json(v);
  doc["vectors"] = vec;
  json forms = json::object();
  for (const auto& [k, f] : e.forms) {
    json comps = json::object();
    for (std::size_t i = 0; i < f.size(); ++i) {
      Index ix = f.unflat(i);
      if (increasing(ix) && !f[i].is_zero()) comps[index_string(ix)] = expr_string(f[i]);
    }
    forms[k] = {{"rank", f.rank()}, {"components", comps}};
  }
  doc["forms"] = forms;
  json tensors = json::object();
  for (const auto& [k, t] : e.tensors) {
    json comps = json::object();
    for (std::size_t i = 0; i < t.size(); ++i)
      if (!t[i].is_zero()) comps[index_string(t.unflat(i))] = expr_string(t[i]);
    tensors[k] = {{"variance", variance_string(t)}, {"symmetry", symmetry_string(t.symmetry())}, {"components", comps}};
  }
  doc["tensors"] = tensors;
  json scalars = json::object();
  for (const auto& [k, s] : e.scalars) scalars[k] = expr_string(s);
  doc["scalars"] = scalars;
  if (e.frame) doc["frame"] = matrix_json(*e.frame);
  if (e.structure) {
    json phi = json::array(), xi = json::array(), eta = json::array();
    for (std::size_t a = 0; a < 3; ++a) {
      phi.push_back(mixed_json(e.structure->phi[a]));
      xi.push_back(vector_json(e.structure->xi[a]));
      eta.push_back(vector_json(e.structure->eta[a]));
    }
    doc["structures"] = {{"phi", phi}, {"xi", xi}, {"eta", eta}, {"eps", e.structure->eps}};
  }
  json manifest = json::array();
  for (const auto& m : e.manifest) {
    json item = {{"check", m.check}, {"target", m.target}, {"expect_pass", m.expect_pass}};
    if (m.component)
      item["component"] = {{"index", index_string(m.component->index)}, {"value", expr_string(m.component->value)}};
    manifest.push_back(item);
  }
  doc["manifest"] = manifest;
  doc["metadata"] = e.metadata;
  return doc;
}

CatalogEntry read_manifold_file(const std::string& path, const ParamEnv& overrides) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("'" + path + "': " + e.what());
  }
  try {
    return entry_from_json(doc, overrides);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

json report_to_json(const ResidualReport& r, const std::string& target, const CheckOptions& opt) {
  auto num = [](double v) -> json {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
  };
  json extra = json::object();
  for (const auto& [k, v] : r.extra) extra[k] = num(v);
  json worst = json::object();
  for (const auto& [k, v] : r.worst_point) worst[k] = num(v);
  json out = {{"check", r.check},
              {"target", target},
              {"tolerance", r.tolerance},
              {"points", opt.points},
              {"seed", opt.seed},
              {"max_residual", num(r.max_abs)},
              {"max_relative_residual", num(r.max_rel)},
              {"pass", r.pass},
              {"worst_point", worst},
              {"extra", extra}};
  if (!r.notes.empty()) out["notes"] = r.notes;
  return out;
}

}  // namespace hidsym::cli
