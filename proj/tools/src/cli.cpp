#include "hidsym_cli/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include "hidsym/algebra.hpp"
#include "hidsym/catalog.hpp"
#include "hidsym/geodesic.hpp"
#include "hidsym/killing.hpp"
#include "hidsym/simplify.hpp"
#include "hidsym_cli/manifold_file.hpp"

namespace hidsym::cli {

using nlohmann::json;

namespace {

struct Source {
  std::string manifold_file;
  std::string catalog;
  std::vector<std::string> params;
};

struct Common {
  Source source;
  std::string target;
  std::size_t points = 20;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  bool json = true;
  bool pretty = false;
  unsigned threads = 0;
  [[nodiscard]] CheckOptions options() const { return {points, seed, tol}; }
};

void add_source(CLI::App* app, Source& s) {
  auto* file = app->add_option("--manifold", s.manifold_file, "Manifold definition file (JSON)");
  auto* cat = app->add_option("--catalog", s.catalog, "Built-in catalog entry");
  file->excludes(cat);
  app->add_option("--param", s.params, "Parameter override name=value")->type_name("NAME=VALUE");
}

void add_common(CLI::App* app, Common& c, bool with_target = true) {
  add_source(app, c.source);
  if (with_target) app->add_option("--target", c.target, "Target object name");
  app->add_option("--points", c.points, "Sample points")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "Sampling seed");
  app->add_option("--tol", c.tol, "Relative tolerance")->check(CLI::NonNegativeNumber);
  app->add_flag("--json", c.json, "JSON lines output (default)");
  app->add_flag("--pretty", c.pretty, "Human-readable output");
  app->add_option("--threads", c.threads, "Worker threads for independent checks");
}

ParamEnv parse_params(const std::vector<std::string>& items) {
  ParamEnv env;
  for (const auto& s : items) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("bad --param '" + s + "', expected name=value");
    try {
      std::size_t used = 0;
      double v = std::stod(s.substr(eq + 1), &used);
      if (used != s.size() - eq - 1) throw std::invalid_argument(s);
      env[s.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw InputError("bad --param value in '" + s + "'");
    }
  }
  return env;
}

CatalogEntry load(const Source& s) {
  ParamEnv params = parse_params(s.params);
  if (!s.manifold_file.empty()) return read_manifold_file(s.manifold_file, params);
  if (!s.catalog.empty()) return catalog_entry(s.catalog, params);
  throw InputError("one of --manifold or --catalog is required");
}

std::vector<double> parse_numbers(const std::string& s, std::size_t n, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::logic_error&) {
      throw InputError(std::string("bad number in ") + what + ": '" + part + "'");
    }
  }
  if (v.size() != n) throw InputError(std::string(what) + " needs " + std::to_string(n) + " comma-separated values");
  return v;
}

class Output {
 public:
  Output(std::ostream& os, bool pretty) : os_(os), pretty_(pretty) {}

  void report(const json& j) {
    if (!pretty_) {
      os_ << j.dump() << '\n';
      return;
    }
    std::ostringstream line;
    line << std::left << std::setw(22) << j.value("check", "") << ' ' << std::setw(18) << j.value("target", "") << ' '
         << (j.value("pass", false) ? "pass" : "FAIL");
    if (j.contains("max_relative_residual")) line << "  rel=" << j["max_relative_residual"].dump();
    if (j.contains("extra") && j["extra"].contains("expectation_met"))
      line << (j["extra"]["expectation_met"].get<double>() != 0.0 ? "  (as expected)" : "  (UNEXPECTED)");
    os_ << line.str() << '\n';
  }
  void document(const json& j) { os_ << (pretty_ ? j.dump(2) : j.dump()) << '\n'; }

 private:
  std::ostream& os_;
  bool pretty_;
};

/// Runs independent jobs on a pool and returns results in submission order.
template <class T>
std::vector<T> run_ordered(std::vector<std::function<T()>> jobs, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<T> out(jobs.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs.size());
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      try {
        out[i] = jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::min<std::size_t>(threads, jobs.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

/// Runs (check, target) pairs; manifest items supply expectations and closed
/// forms. Returns whether every expectation was met.
bool run_items(const CatalogEntry& e, const std::vector<ManifestItem>& items, const Common& c, Output& out) {
  CheckOptions opt = c.options();
  std::vector<std::function<ResidualReport()>> jobs;
  for (const auto& item : items) jobs.emplace_back([&e, item, opt] { return run_manifest_item(e, item, opt); });
  auto reports = run_ordered(std::move(jobs), c.threads);
  bool ok = true;
  for (std::size_t i = 0; i < items.size(); ++i) {
    ok = ok && reports[i].extra.at("expectation_met") != 0.0;
    out.report(report_to_json(reports[i], items[i].target, opt));
  }
  return ok;
}

std::vector<ManifestItem> select_items(const CatalogEntry& e, const std::vector<std::string>& checks,
                                       const std::string& target) {
  std::vector<ManifestItem> items;
  for (const auto& check : checks) {
    if (!target.empty()) {
      auto it = std::find_if(e.manifest.begin(), e.manifest.end(),
                             [&](const ManifestItem& m) { return m.check == check && m.target == target; });
      items.push_back(it != e.manifest.end() ? *it : ManifestItem{check, target, true, std::nullopt});
      continue;
    }
    for (const auto& m : e.manifest)
      if (m.check == check) items.push_back(m);
  }
  if (items.empty()) throw InputError("no targets: pass --target or use an entry whose manifest lists this check");
  return items;
}

json algebra_json(const AlgebraReport& r, const std::string& target, std::uint64_t seed) {
  json j = {{"check", r.check},
            {"target", target},
            {"tolerance", 0.0},
            {"points", r.cases},
            {"seed", seed},
            {"max_residual", r.failures.empty() ? 0.0 : 1.0},
            {"max_relative_residual", r.failures.empty() ? 0.0 : 1.0},
            {"pass", r.pass},
            {"worst_point", json::object()},
            {"extra", {{"cases", r.cases}, {"failures", r.failures.size()}}}};
  if (!r.failures.empty()) j["notes"] = r.failures;
  return j;
}

json loop_element_json(const LoopElement& e) {
  json j = json::object();
  for (const auto& [g, c] : e) j[to_string(g)] = c.str();
  return j;
}

json algebra_element_json(const AlgebraElement& e) {
  json j = json::object();
  for (const auto& [g, c] : e.terms()) j[to_string(g)] = c.str();
  return j;
}

int cmd_algebra_table(int cutoff, Output& out) {
  json base = json::array();
  std::vector<Generator> gens;
  for (GenKind k : {GenKind::J, GenKind::K, GenKind::Q})
    for (int i = 1; i <= 3; ++i) gens.push_back({k, i});
  for (const auto& a : gens)
    for (const auto& b : gens) {
      auto r = bracket(a, b);
      if (!r.is_zero()) base.push_back({{"a", to_string(a)}, {"b", to_string(b)}, {"bracket", algebra_element_json(r)}});
    }
  json loop = json::array();
  auto lg = loop_generators(cutoff);
  for (const auto& a : lg)
    for (const auto& b : lg) {
      auto r = loop_bracket(a, b);
      if (!r.empty()) loop.push_back({{"a", to_string(a)}, {"b", to_string(b)}, {"bracket", loop_element_json(r)}});
    }
  json gnames = json::array();
  for (const auto& g : lg) gnames.push_back(to_string(g));
  out.document({{"check", "algebra-table"},
                {"cutoff", cutoff},
                {"base", base},
                {"loop_generators", gnames},
                {"loop", loop},
                {"absorb", "A^i_2n -> J_i B^n, B^i_2n+2 -> K_i B^n"}});
  return kOk;
}

int cmd_algebra_jacobi(int cutoff, std::uint64_t seed, Output& out) {
  std::string t = "cutoff=" + std::to_string(cutoff);
  std::array<AlgebraReport, 3> r{jacobi_check_base(), jacobi_check(cutoff), grade_absorb(cutoff)};
  out.report(algebra_json(r[0], "base", seed));
  out.report(algebra_json(r[1], t, seed));
  out.report(algebra_json(r[2], t, seed));
  return r[0].pass && r[1].pass && r[2].pass ? kOk : kCheckFailed;
}

int cmd_quaternion_units(std::uint64_t seed, Output& out) {
  auto r = quaternion_table_check();
  json table = json::array();
  const char* names[] = {"I", "Q1", "Q2", "Q3"};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      Quaternion x{}, y{};
      x[a] = GaussRational(1);
      y[b] = GaussRational(1);
      auto p = quaternion_product(x, y);
      json prod = json::object();
      for (int k = 0; k < 4; ++k)
        if (!p[k].is_zero()) prod[names[k]] = p[k].str();
      table.push_back({{"a", names[a]}, {"b", names[b]}, {"product", prod}});
    }
  json j = algebra_json(r, "Q-table", seed);
  j["extra"]["products"] = table;
  out.report(j);
  return r.pass ? kOk : kCheckFailed;
}

int cmd_construct(const Common& c, Output& out) {
  if (c.target.empty()) throw InputError("construct assoc-sk needs --target FORM");
  CatalogEntry e = load(c.source);
  auto it = e.forms.find(c.target);
  if (it == e.forms.end()) throw InputError("unknown form '" + c.target + "'");
  const Manifold& M = e.manifold;
  require_antisymmetric(it->second, M);
  TensorField k = simplified(associated_sk(it->second, M));
  ResidualReport r = sk_residual(k, M, c.options());
  json j = report_to_json(r, c.target, c.options());
  json comps = json::object();
  for (std::size_t i = 0; i < k.size(); ++i) {
    Index ix = k.unflat(i);
    if (ix[0] <= ix[1] && !k[i].is_zero()) comps[index_string(ix)] = to_string(k[i]);
  }
  j["tensor"] = {{"variance", "dd"}, {"symmetry", "symmetric"}, {"components", comps}};
  out.report(j);
  return r.pass ? kOk : kCheckFailed;
}

struct GeodesicArgs {
  std::string x, v, method = "rk4", csv;
  double t0 = 0.0, t1 = 10.0, step = 1e-3, rk_tol = 1e-10, drift_tol = 1e-8;
  std::size_t stride = 1;
  std::vector<std::string> invariants, periodic;
};

int cmd_geodesic(const Common& c, const GeodesicArgs& g, Output& out) {
  CatalogEntry e = load(c.source);
  const Manifold& M = e.manifold;
  std::size_t n = M.dim();
  IntegratorConfig cfg;
  if (g.method == "rk4") cfg.method = Method::RK4;
  else if (g.method == "rk45") cfg.method = Method::RK45;
  else throw InputError("unknown method '" + g.method + "'");
  cfg.step = g.step;
  cfg.tolerance = g.rk_tol;
  cfg.t0 = g.t0;
  cfg.t1 = g.t1;
  cfg.stride = g.stride;
  for (const auto& p : g.periodic) {
    auto eq = p.find('=');
    if (eq == std::string::npos) throw InputError("bad --periodic '" + p + "', expected coord=period");
    std::string name = p.substr(0, eq);
    (void)M.chart().index_of(name);
    Expr period = simplify(parse(p.substr(eq + 1), {}));
    cfg.periodic[name] = evaluate(period, {}, {{"pi", std::numbers::pi}});
  }
  auto x = parse_numbers(g.x, n, "--x");
  auto v = parse_numbers(g.v, n, "--v");
  GeodesicState s0{g.t0, M.chart().to_point(x), M.chart().to_point(v)};
  Trajectory traj = integrate(M, s0, cfg);

  std::vector<Invariant> inv{Invariant("energy", M.metric_tensor(), M)};
  for (const auto& name : g.invariants) {
    if (auto it = e.tensors.find(name); it != e.tensors.end()) inv.emplace_back(name, it->second, M);
    else if (auto jt = e.vectors.find(name); jt != e.vectors.end()) inv.emplace_back(name, jt->second, M);
    else throw InputError("unknown invariant '" + name + "'");
  }
  if (!g.csv.empty()) {
    std::ofstream f(g.csv);
    if (!f) throw InputError("cannot write '" + g.csv + "'");
    write_csv(f, traj, M, inv);
  }
  const char* status = traj.status == TrajectoryStatus::Completed  ? "completed"
                       : traj.status == TrajectoryStatus::DomainExit ? "domain-exit"
                                                                     : "step-underflow";
  json tj = {{"check", "trajectory"},
             {"target", g.method},
             {"tolerance", cfg.tolerance},
             {"points", traj.states.size()},
             {"seed", c.seed},
             {"max_residual", 0.0},
             {"max_relative_residual", 0.0},
             {"pass", traj.complete()},
             {"worst_point", json::object()},
             {"extra", {{"steps", traj.steps}, {"t_end", traj.states.back().t}}},
             {"status", status}};
  for (std::size_t i = 0; i < n; ++i) tj["worst_point"][M.chart().coordinates()[i]] = traj.states.back().position.at(M.chart().coordinates()[i]);
  out.report(tj);
  bool ok = traj.complete();
  for (const auto& q : inv) {
    auto r = monitor_invariant(traj, q, M, g.drift_tol);
    out.report({{"check", "conservation"},
                {"target", r.name},
                {"tolerance", r.tolerance},
                {"points", r.samples},
                {"seed", c.seed},
                {"max_residual", r.max_abs_drift},
                {"max_relative_residual", r.relative_drift},
                {"pass", r.pass},
                {"worst_point", json::object()},
                {"extra", {{"initial", r.initial}}}});
    ok = ok && r.pass;
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_catalog_export(const Common& c, const std::string& output, Output& out) {
  CatalogEntry e = load(c.source);
  json doc = entry_to_json(e);
  if (output.empty()) {
    out.document(doc);
    return kOk;
  }
  std::ofstream f(output);
  if (!f) throw InputError("cannot write '" + output + "'");
  f << doc.dump(2) << '\n';
  return kOk;
}

int dispatch(CLI::App& app, std::vector<std::string> args, std::ostream& out_stream) {
  app.require_subcommand(1);
  std::vector<std::function<int()>> actions;
  auto bind = [&](CLI::App* sub, std::function<int()> f) {
    sub->final_callback([&actions, f] { actions.push_back(f); });
  };

  // check
  Common cc;
  auto* check = app.add_subcommand("check", "Verify symmetry objects");
  check->require_subcommand(1);
  for (const char* kind :
       {"killing-vector", "conformal-killing", "cky", "ky", "sk", "covconst", "unit-root", "quaternion"}) {
    auto* sub = check->add_subcommand(kind, std::string("Run ") + kind + " checks");
    add_common(sub, cc);
    std::string k = kind;
    bind(sub, [&cc, &out_stream, k] {
      CatalogEntry e = load(cc.source);
      Output out(out_stream, cc.pretty);
      return run_items(e, select_items(e, {k}, cc.target), cc, out) ? kOk : kCheckFailed;
    });
  }

  // construct
  Common kc;
  auto* construct = app.add_subcommand("construct", "Build derived tensors");
  construct->require_subcommand(1);
  auto* assoc = construct->add_subcommand("assoc-sk", "Associated Stackel-Killing tensor of a K-Y form");
  add_common(assoc, kc);
  bind(assoc, [&] {
    Output out(out_stream, kc.pretty);
    return cmd_construct(kc, out);
  });

  // geodesic
  Common gc;
  GeodesicArgs ga;
  auto* geo = app.add_subcommand("geodesic", "Geodesic integration");
  geo->require_subcommand(1);
  auto* run = geo->add_subcommand("run", "Integrate one geodesic and monitor invariants");
  add_source(run, gc.source);
  run->add_option("--x", ga.x, "Initial position, comma-separated")->required();
  run->add_option("--v", ga.v, "Initial velocity, comma-separated")->required();
  run->add_option("--t0", ga.t0);
  run->add_option("--t1", ga.t1);
  run->add_option("--step", ga.step)->check(CLI::PositiveNumber);
  run->add_option("--method", ga.method)->check(CLI::IsMember({"rk4", "rk45"}));
  run->add_option("--rk-tol", ga.rk_tol, "RK45 local error tolerance")->check(CLI::PositiveNumber);
  run->add_option("--drift-tol", ga.drift_tol, "Allowed relative drift of invariants")->check(CLI::PositiveNumber);
  run->add_option("--stride", ga.stride)->check(CLI::PositiveNumber);
  run->add_option("--invariant", ga.invariants, "Tensor or vector name to monitor");
  run->add_option("--periodic", ga.periodic, "coord=period, e.g. phi=2*pi");
  run->add_option("--csv", ga.csv, "Write the trajectory as CSV");
  run->add_option("--seed", gc.seed);
  run->add_flag("--json", gc.json);
  run->add_flag("--pretty", gc.pretty);
  bind(run, [&] {
    Output out(out_stream, gc.pretty);
    return cmd_geodesic(gc, ga, out);
  });

  // spin
  Common sc;
  auto* spin = app.add_subcommand("spin", "Dirac-type operator identities");
  spin->require_subcommand(1);
  for (const char* kind : {"anticommute", "commute", "square"}) {
    auto* sub = spin->add_subcommand(kind, std::string("Spin ") + kind + " check against D_s");
    add_common(sub, sc);
    std::string k = std::string("spin-") + kind;
    bind(sub, [&sc, &out_stream, k] {
      CatalogEntry e = load(sc.source);
      Output out(out_stream, sc.pretty);
      return run_items(e, select_items(e, {k}, sc.target), sc, out) ? kOk : kCheckFailed;
    });
  }

  // algebra
  int cutoff = 10;
  std::uint64_t aseed = 0;
  bool apretty = false;
  auto* alg = app.add_subcommand("algebra", "Exact graded algebra checks");
  alg->require_subcommand(1);
  auto* table = alg->add_subcommand("table", "Structure constants as JSON");
  auto* jacobi = alg->add_subcommand("jacobi", "Jacobi identity and grade absorption");
  auto* qunits = alg->add_subcommand("quaternion-units", "Quaternion unit table");
  for (auto* sub : {table, jacobi, qunits}) {
    sub->add_option("--cutoff", cutoff, "Largest loop index n")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", aseed);
    sub->add_flag("--json");
    sub->add_flag("--pretty", apretty);
  }
  bind(table, [&] {
    Output out(out_stream, apretty);
    return cmd_algebra_table(cutoff, out);
  });
  bind(jacobi, [&] {
    Output out(out_stream, apretty);
    return cmd_algebra_jacobi(cutoff, aseed, out);
  });
  bind(qunits, [&] {
    Output out(out_stream, apretty);
    return cmd_quaternion_units(aseed, out);
  });

  // sasaki
  Common zc;
  std::string lambda;
  auto* sas = app.add_subcommand("sasaki", "Mixed 3-Sasakian structure checks");
  sas->require_subcommand(1);
  const std::vector<std::pair<const char*, std::vector<std::string>>> groups{
      {"verify", {"structure", "sasakian", "killing-triple", "curvature", "sectional"}},
      {"cone", {"para-hyperkahler", "cone-ricci-flat", "cone-round-trip"}},
      {"einstein", {"einstein"}},
      {"witness", {"witness"}}};
  for (const auto& [name, checks] : groups) {
    auto* sub = sas->add_subcommand(name);
    add_common(sub, zc, false);
    if (std::string(name) == "einstein") sub->add_option("--lambda", lambda, "Einstein constant (rational)");
    std::vector<std::string> ch = checks;
    bool einstein = std::string(name) == "einstein";
    bind(sub, [&zc, &lambda, &out_stream, ch, einstein] {
      CatalogEntry e = load(zc.source);
      if (!e.structure) throw InputError("entry '" + e.name + "' has no mixed 3-structure");
      std::string target = "structure";
      if (einstein) {
        target = lambda;
        if (target.empty()) {
          auto it = e.metadata.find("einstein_constant");
          if (it == e.metadata.end()) throw InputError("--lambda is required for this entry");
          target = it->second;
        }
      }
      std::vector<ManifestItem> items;
      for (const auto& c : ch) {
        auto sel = select_items(e, {c}, target);
        items.insert(items.end(), sel.begin(), sel.end());
      }
      Output out(out_stream, zc.pretty);
      return run_items(e, items, zc, out) ? kOk : kCheckFailed;
    });
  }

  // catalog
  Common ec;
  std::string output;
  bool lpretty = false;
  auto* catalog = app.add_subcommand("catalog", "Built-in geometries");
  catalog->require_subcommand(1);
  auto* exp = catalog->add_subcommand("export", "Write an entry as a manifold definition file");
  add_source(exp, ec.source);
  exp->add_option("--output,-o", output, "Output file (default: standard output)");
  exp->add_flag("--json", ec.json);
  exp->add_flag("--pretty", ec.pretty);
  bind(exp, [&] {
    Output out(out_stream, ec.pretty);
    return cmd_catalog_export(ec, output, out);
  });
  auto* list = catalog->add_subcommand("list", "Names of built-in entries");
  list->add_flag("--json");
  list->add_flag("--pretty", lpretty);
  bind(list, [&] {
    Output out(out_stream, lpretty);
    out.document({{"catalog", catalog_names()}});
    return kOk;
  });

  std::reverse(args.begin(), args.end());
  app.parse(std::move(args));
  int code = kOk;
  for (auto& a : actions) code = std::max(code, a());
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hidden-symmetry geometry toolkit", "hidsym"};
  try {
    return dispatch(app, args, out);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const UnboundNameError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInputError;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace hidsym::cli
