#include "tonelli/report.hpp"

#include <chrono>
#include <cstdint>
#include <sstream>

#include "tonelli/acceptance.hpp"
#include "tonelli/action.hpp"
#include "tonelli/green.hpp"
#include "tonelli/integrator.hpp"
#include "tonelli/kam.hpp"
#include "tonelli/periodic_torus.hpp"
#include "tonelli/weak_kam.hpp"

namespace tonelli {

void require_keys(const Json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

Vec json_to_vec(const Json& a, const std::string& what) {
  if (!a.is_array() || a.empty()) throw ConfigError(what + ": expected a nonempty array");
  Vec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number()) throw ConfigError(what + ": expected numbers");
    v[static_cast<int>(i)] = a[i].get<double>();
  }
  return v;
}

IVec json_to_ivec(const Json& a, const std::string& what) {
  if (!a.is_array() || a.empty()) throw ConfigError(what + ": expected a nonempty array");
  IVec v(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_number_integer()) throw ConfigError(what + ": expected integers");
    v[static_cast<int>(i)] = a[i].get<int>();
  }
  return v;
}

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json mat_to_json(const Mat& m) {
  Json a = Json::array();  // row-major
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

namespace {

Json ivec_to_json(const IVec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::vector<int> grid_shape(const Json& a) {
  const IVec s = json_to_ivec(a, "grid");
  std::vector<int> shape(s.size());
  for (int i = 0; i < s.size(); ++i) shape[i] = s[i];
  return shape;
}

Json sections_to_json(const std::vector<Vec>& sections) {
  Json a = Json::array();  // node-major, row-major components
  for (const Vec& s : sections)
    for (int i = 0; i < s.size(); ++i) a.push_back(s[i]);
  return a;
}

double get_number(const Json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key) || !obj.at(key).is_number())
    throw ConfigError(ctx + ": missing numeric field '" + key + "'");
  return obj.at(key).get<double>();
}

Json task_flow(const HamiltonianModel& h, const IntegratorSpec& spec, const Json& p, bool& pass) {
  require_keys(p, {"x", "p", "t"}, "flow params");
  const Vec x = json_to_vec(p.at("x"), "flow.x");
  const Vec mom = json_to_vec(p.at("p"), "flow.p");
  const double t = get_number(p, "t", "flow");
  const LiftedState z0(x, mom);
  const double e0 = h.eval(wrap_unit(x), mom);
  const LiftedState z1 = flow(h, z0, t, spec);
  const double e1 = h.eval(wrap_unit(z1.x), z1.p);
  Json payload;
  payload["x"] = vec_to_json(z1.x);
  payload["p"] = vec_to_json(z1.p);
  payload["winding"] = ivec_to_json(z1.winding);
  payload["energy_drift"] = std::abs(e1 - e0);
  pass = std::isfinite(e1);
  return payload;
}

Json task_minimize(const HamiltonianModel& h, const IntegratorSpec& spec, const Json& p,
                   bool& pass) {
  require_keys(p, {"x", "y", "t", "path_nodes"}, "minimize params");
  MinActionOptions opt;
  opt.integrator = spec;
  const ActionResult r = min_action(h, json_to_vec(p.at("x"), "minimize.x"),
                                    json_to_vec(p.at("y"), "minimize.y"),
                                    get_number(p, "t", "minimize"), opt);
  const int nodes = p.value("path_nodes", 33);
  Json path = Json::array();
  const size_t count = r.path.points.size();
  for (int k = 0; k < nodes && count > 0; ++k) {
    const size_t j = count == 1 ? 0 : (k * (count - 1)) / (nodes - 1);
    Json node;
    node["t"] = r.path.times[j];
    node["x"] = vec_to_json(r.path.points[j]);
    node["v"] = vec_to_json(r.path.velocities[j]);
    path.push_back(node);
  }
  Json payload;
  payload["value"] = r.value;
  payload["gradient_norm"] = r.gradient_norm;
  payload["converged"] = r.converged;
  payload["tie"] = r.tie;
  payload["initial_velocity"] = vec_to_json(r.initial_velocity);
  payload["initial_momentum"] = vec_to_json(r.initial_momentum);
  payload["path"] = path;
  pass = r.converged;
  return payload;
}

Json task_torus(const HamiltonianModel& h, const IntegratorSpec& spec, const Json& p, bool& pass) {
  require_keys(p, {"T", "r", "grid"}, "torus-periodic params");
  TorusOptions opt;
  opt.integrator = spec;
  const double T = get_number(p, "T", "torus-periodic");
  const IVec r = json_to_ivec(p.at("r"), "torus-periodic.r");
  const PeriodicTorusData torus = build_torus(h, T, r, Grid(grid_shape(p.at("grid"))), opt);
  const TorusDiagnostics& d = torus.diagnostics;
  Json payload;
  payload["T"] = T;
  payload["r"] = ivec_to_json(r);
  payload["c"] = vec_to_json(cohomology_class_of(torus));
  payload["action"] = torus.action_per_orbit;
  payload["residuals"] = {{"closure", d.closure_residual},
                          {"action_spread", d.action_spread},
                          {"lagrangian_defect", d.lagrangian_defect},
                          {"invariance_defect", d.invariance_defect},
                          {"fixedness", d.fixedness},
                          {"homotopy_ok", d.homotopy_ok}};
  payload["sections"] = {{"X", sections_to_json(torus.X)}, {"P", sections_to_json(torus.P)}};
  pass = d.closure_residual < 1e-8 && d.action_spread < 1e-7 && d.lagrangian_defect < 1e-6 &&
         d.fixedness < 1e-7 && d.homotopy_ok;
  return payload;
}

CotangentState parse_state(const Json& p, const std::string& ctx) {
  if (!p.contains("z")) throw ConfigError(ctx + ": missing 'z'");
  require_keys(p.at("z"), {"theta", "p"}, ctx + ".z");
  return CotangentState(json_to_vec(p.at("z").at("theta"), ctx + ".z.theta"),
                        json_to_vec(p.at("z").at("p"), ctx + ".z.p"));
}

Json task_green(const HamiltonianModel& h, const IntegratorSpec& spec, const Json& p, bool& pass) {
  require_keys(p, {"z", "horizon", "scan_step"}, "green params");
  const CotangentState z = parse_state(p, "green");
  const double horizon = get_number(p, "horizon", "green");
  const GreenResult gp = green_plus(h, z, horizon, spec);
  const GreenResult gm = green_minus(h, z, horizon, spec);
  Json payload;
  payload["s_plus"] = mat_to_json(gp.plane.s);
  payload["s_minus"] = mat_to_json(gm.plane.s);
  payload["transversality_plus"] = gp.plane.transversality;
  payload["transversality_minus"] = gm.plane.transversality;
  payload["cauchy_plus"] = gp.cauchy_increment;
  payload["cauchy_minus"] = gm.cauchy_increment;
  payload["empirical_rate_plus"] = gp.empirical_rate;
  payload["intersection_dim"] = green_intersection_dim(gm.plane, gp.plane, 1e-6);
  if (p.contains("scan_step")) {
    const auto times = conjugate_scan(h, z, horizon, p.at("scan_step").get<double>(), spec);
    payload["conjugate_times"] = times;
  }
  // monotone order S- <= S+ as matrices
  const Mat gap = gp.plane.s - gm.plane.s;
  const double min_eig =
      Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (gap + gap.transpose())).eigenvalues().minCoeff();
  payload["order_min_eigenvalue"] = min_eig;
  pass = gp.plane.has_s && gm.plane.has_s && min_eig > -1e-8;
  return payload;
}

Json task_lyapunov(const HamiltonianModel& h, const IntegratorSpec& spec, const Json& p,
                   bool& pass) {
  require_keys(p, {"z", "horizon"}, "lyapunov params");
  const LyapunovReport r =
      lyapunov_spectrum(h, parse_state(p, "lyapunov"), get_number(p, "horizon", "lyapunov"), spec);
  Json payload;
  payload["exponents"] = vec_to_json(r.exponents);
  payload["threshold"] = r.threshold;
  payload["zero_count"] = r.zero_count;
  payload["sum"] = r.exponents.sum();
  pass = std::abs(r.exponents.sum()) < 10 * r.threshold;  // symplectic pairing
  return payload;
}

Json task_kam(const HamiltonianModel& h, const IntegratorSpec& spec, const Json& p, bool& pass) {
  require_keys(p, {"T", "r", "grid", "omega", "m_min", "m_max", "tau", "cutoff"}, "kam params");
  const std::string omega_kind = p.value("omega", "golden");
  if (omega_kind != "golden") throw ConfigError("kam: only omega='golden' is catalogued");
  TorusOptions topt;
  const double T = get_number(p, "T", "kam");
  const PeriodicTorusData torus = build_torus(h, T, json_to_ivec(p.at("r"), "kam.r"),
                                              Grid(grid_shape(p.at("grid"))), topt);
  const NormalFormData nf = extract_twist(h, torus);
  const double tau = p.value("tau", h.dim() + 0.2);
  const DiophantineVector omega =
      verify_diophantine(golden_frequency(h.dim()), tau, p.value("cutoff", 500));
  FamilyOptions fopt;
  fopt.integrator = spec;
  const int m_min = p.value("m_min", 4), m_max = p.value("m_max", 8);
  const auto members = torus_family(h, torus, nf, omega, m_min, m_max, fopt);
  Json arr = Json::array();
  bool all = true;
  for (const FamilyMember& m : members) {
    Json e;
    e["m"] = m.m;
    e["converged"] = m.converged;
    e["residual"] = m.residual;
    e["rotation_error"] = m.rotation_error;
    e["c0_distance"] = m.c0_distance;
    e["flow_invariance_T"] = m.flow_invariance_T;
    arr.push_back(e);
    all = all && m.converged;
  }
  Json payload;
  payload["abar"] = mat_to_json(nf.abar);
  payload["gamma"] = omega.gamma;
  payload["omega"] = vec_to_json(omega.omega);
  payload["members"] = arr;
  pass = all;
  return payload;
}

Json task_alpha(const HamiltonianModel& h, const Json& p, bool& pass) {
  require_keys(p, {"c", "grid", "tau"}, "alpha params");
  WeakKamOptions opt;
  opt.tau = p.value("tau", opt.tau);
  const ValueGrid vg =
      lax_oleinik_alpha(h, json_to_vec(p.at("c"), "alpha.c"), Grid(grid_shape(p.at("grid"))), opt);
  const AubryEstimate ae = aubry_estimate(vg);
  Json mask = Json::array();
  std::vector<bool> in_aubry(vg.u.size(), false);
  for (int node : ae.nodes) in_aubry[node] = true;
  for (bool b : in_aubry) mask.push_back(b ? 1 : 0);
  Json payload;
  payload["alpha"] = vg.alpha;
  payload["u"] = vec_to_json(vg.u);
  payload["aubry_mask"] = mask;
  payload["momenta"] = sections_to_json(ae.momenta);
  payload["iterations"] = vg.iterations;
  payload["increment"] = vg.increment;
  pass = vg.converged;
  return payload;
}

Json task_foliation(const HamiltonianModel& h, const Json& p, bool& pass) {
  require_keys(p, {"x", "classes", "grid", "tau"}, "foliation params");
  WeakKamOptions opt;
  opt.tau = p.value("tau", opt.tau);
  if (!p.contains("classes") || !p.at("classes").is_array())
    throw ConfigError("foliation: 'classes' must be an array of class vectors");
  std::vector<Vec> classes;
  for (const Json& c : p.at("classes")) classes.push_back(json_to_vec(c, "foliation.classes"));
  const FoliationReport rep = foliation_map(h, json_to_vec(p.at("x"), "foliation.x"), classes,
                                            Grid(grid_shape(p.at("grid"))), opt);
  Json payload;
  payload["alphas"] = rep.alphas;
  payload["momenta_at_x"] = sections_to_json(rep.momenta_at_x);
  payload["min_injectivity_ratio"] = rep.min_injectivity_ratio;
  payload["min_leaf_separation"] = rep.min_leaf_separation;
  payload["energy_identity_defect"] = rep.energy_identity_defect;
  pass = rep.min_injectivity_ratio > 0 && rep.energy_identity_defect < 5e-3;
  return payload;
}

Json task_acceptance(const Json& p, bool& pass) {
  require_keys(p, {"criteria"}, "acceptance params");
  std::vector<int> wanted;
  if (p.contains("criteria"))
    for (const Json& c : p.at("criteria")) wanted.push_back(c.get<int>());
  const auto results = run_acceptance(wanted);
  Json arr = Json::array();
  pass = true;
  for (const CriterionResult& r : results) {
    arr.push_back({{"number", r.number},
                   {"name", r.name},
                   {"pass", r.pass},
                   {"details", r.details},
                   {"seconds", r.seconds}});
    pass = pass && r.pass;
  }
  Json payload;
  payload["criteria"] = arr;
  return payload;
}

void flatten_csv(const Json& node, const std::string& prefix, std::ostringstream& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items())
      flatten_csv(value, prefix.empty() ? key : prefix + "." + key, out);
  } else if (node.is_array()) {
    for (size_t i = 0; i < node.size(); ++i)
      flatten_csv(node[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (node.is_number()) {
    out << prefix << "," << node.dump() << "\n";
  } else if (node.is_boolean()) {
    out << prefix << "," << (node.get<bool>() ? 1 : 0) << "\n";
  }
}

void compare_walk(const Json& a, const Json& b, const std::string& path, double default_tol,
                  const Json& field_tols, Json& diffs) {
  double tol = default_tol;
  if (field_tols.contains(path) && field_tols.at(path).is_number())
    tol = field_tols.at(path).get<double>();
  if (a.is_object() && b.is_object()) {
    for (const auto& [key, value] : a.items()) {
      const std::string sub = path.empty() ? key : path + "." + key;
      if (!b.contains(key)) {
        diffs.push_back({{"field", sub}, {"kind", "missing_in_b"}});
      } else {
        compare_walk(value, b.at(key), sub, default_tol, field_tols, diffs);
      }
    }
    for (const auto& [key, value] : b.items())
      if (!a.contains(key))
        diffs.push_back({{"field", path.empty() ? key : path + "." + key},
                         {"kind", "missing_in_a"}});
  } else if (a.is_array() && b.is_array()) {
    if (a.size() != b.size()) {
      diffs.push_back({{"field", path}, {"kind", "length"}, {"a", a.size()}, {"b", b.size()}});
      return;
    }
    for (size_t i = 0; i < a.size(); ++i)
      compare_walk(a[i], b[i], path + "[" + std::to_string(i) + "]", default_tol, field_tols,
                   diffs);
  } else if (a.is_number() && b.is_number()) {
    const double da = a.get<double>(), db = b.get<double>();
    const double delta = std::abs(da - db);
    if (!(delta <= tol))
      diffs.push_back({{"field", path}, {"kind", "numeric"}, {"a", da}, {"b", db},
                       {"delta", delta}, {"tol", tol}});
  } else if (a != b) {
    diffs.push_back({{"field", path}, {"kind", "value"}, {"a", a}, {"b", b}});
  }
}

}  // namespace

RunConfig RunConfig::from_json(const Json& cfg) {
  require_keys(cfg, {"task", "hamiltonian", "integrator", "seed", "params", "output"}, "config");
  RunConfig out;
  if (!cfg.contains("task") || !cfg.at("task").is_string())
    throw ConfigError("config: missing string field 'task'");
  out.task = cfg.at("task").get<std::string>();
  if (cfg.contains("hamiltonian")) {
    const Json& h = cfg.at("hamiltonian");
    require_keys(h, {"name", "dim", "params"}, "config.hamiltonian");
    out.model = h.value("name", out.model);
    out.dim = h.value("dim", out.dim);
    if (h.contains("params")) out.model_params = h.at("params");
  }
  if (cfg.contains("integrator")) {
    const Json& s = cfg.at("integrator");
    require_keys(s, {"method", "h"}, "config.integrator");
    out.method = s.value("method", out.method);
    out.step = s.value("h", out.step);
    if (out.step <= 0) throw ConfigError("config.integrator: h must be positive");
  }
  out.seed = cfg.value("seed", 0L);
  if (cfg.contains("params")) out.params = cfg.at("params");
  return out;
}

Json RunConfig::echo() const {
  Json cfg;
  cfg["task"] = task;
  cfg["hamiltonian"] = {{"name", model}, {"dim", dim}, {"params", model_params}};
  cfg["integrator"] = {{"method", method}, {"h", step}};
  cfg["seed"] = seed;
  cfg["params"] = params;
  return cfg;
}

std::string config_hash(const Json& canonical) {
  const std::string dump = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

RunReport run_task(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const IntegratorSpec spec{cfg.method, cfg.step};
  Json payload;
  bool pass = true;
  if (cfg.task == "acceptance") {
    payload = task_acceptance(cfg.params, pass);
  } else {
    const HamiltonianPtr h = make_hamiltonian(cfg.model, cfg.model_params, cfg.dim);
    if (cfg.task == "flow") {
      payload = task_flow(*h, spec, cfg.params, pass);
    } else if (cfg.task == "minimize") {
      payload = task_minimize(*h, spec, cfg.params, pass);
    } else if (cfg.task == "torus-periodic") {
      payload = task_torus(*h, spec, cfg.params, pass);
    } else if (cfg.task == "green") {
      payload = task_green(*h, spec, cfg.params, pass);
    } else if (cfg.task == "lyapunov") {
      payload = task_lyapunov(*h, spec, cfg.params, pass);
    } else if (cfg.task == "kam") {
      payload = task_kam(*h, spec, cfg.params, pass);
    } else if (cfg.task == "alpha") {
      payload = task_alpha(*h, cfg.params, pass);
    } else if (cfg.task == "foliation") {
      payload = task_foliation(*h, cfg.params, pass);
    } else {
      throw ConfigError("config: unknown task '" + cfg.task + "'");
    }
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RunReport report;
  const Json echo = cfg.echo();
  report.document["config"] = echo;
  report.document["config_hash"] = config_hash(echo);
  report.document["version"] = kCatalogueVersion;
  report.document["seed"] = cfg.seed;
  report.document["wall_time_s"] = wall;
  report.document["payload"] = payload;
  report.document["pass"] = pass;
  report.pass = pass;
  return report;
}

Json compare_reports(const Json& report_a, const Json& report_b, double default_tol,
                     const Json& field_tols) {
  const auto task_of = [](const Json& r) -> std::string {
    if (r.contains("config") && r.at("config").contains("task"))
      return r.at("config").at("task").get<std::string>();
    throw ConfigError("compare: report lacks config.task");
  };
  const std::string ta = task_of(report_a), tb = task_of(report_b);
  if (ta != tb) throw ConfigError("compare: task mismatch (" + ta + " vs " + tb + ")");
  Json diffs = Json::array();
  compare_walk(report_a.at("payload"), report_b.at("payload"), "", default_tol, field_tols, diffs);
  Json out;
  out["task"] = ta;
  out["differences"] = diffs;
  out["identical"] = diffs.empty();
  return out;
}

std::string report_csv(const Json& report) {
  std::ostringstream out;
  out << "field,value\n";
  flatten_csv(report.at("payload"), "", out);
  return out.str();
}

}  // namespace tonelli
