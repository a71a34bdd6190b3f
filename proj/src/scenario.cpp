#include "elastica/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "elastica/buckling.hpp"
#include "elastica/bvp.hpp"
#include "elastica/stability.hpp"

namespace elastica {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Recursive-descent evaluator over + - * / ^ ( ) numbers and pi.
class ExpressionParser {
 public:
  explicit ExpressionParser(const std::string& text) : s_(text) {}

  double parse() {
    const double v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ConfigError("cannot evaluate '" + s_ + "': " + why);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    const double base = primary();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }
  double primary() {
    skip();
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (s_.compare(pos_, 2, "pi") == 0) {
      pos_ += 2;
      return std::numbers::pi;
    }
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string s_;
  std::size_t pos_ = 0;
};

double number(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return evaluate_expression(j.get<std::string>());
  throw ConfigError("'" + key + "' must be a number or an expression string");
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

OrdinateKind parse_param(const json& j, const std::string& key) {
  if (!j.is_string()) throw ConfigError("'" + key + "' must name a parameter");
  try {
    return parse_ordinate_kind(j.get<std::string>());
  } catch (const std::invalid_argument&) {
    throw ConfigError("unknown parameter '" + j.get<std::string>() + "' in '" + key + "'");
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

std::map<OrdinateKind, double> parse_overrides(const json& j) {
  if (!j.is_object()) throw ConfigError("'overrides' must be an object");
  std::map<OrdinateKind, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[parse_param(json(it.key()), "overrides")] = number(it.value(), it.key());
  return out;
}

SeedSpec parse_seed(const json& j) {
  if (!j.is_object()) throw ConfigError("each seed must be an object");
  reject_unknown(j,
                 {"type", "label", "overrides", "index", "delta", "path", "parameter", "from", "min", "max",
                  "direction", "crossing", "modulo_2pi", "require_index", "start"},
                 "seed");
  SeedSpec s;
  const std::string type = j.value("type", "straight");
  if (type == "straight") s.type = SeedSpec::Type::Straight;
  else if (type == "buckled") s.type = SeedSpec::Type::Buckled;
  else if (type == "file") s.type = SeedSpec::Type::File;
  else if (type == "branch") s.type = SeedSpec::Type::Branch;
  else throw ConfigError("unknown seed type '" + type + "'");
  s.label = j.value("label", type);
  if (j.contains("overrides")) s.overrides = parse_overrides(j["overrides"]);
  s.index = j.value("index", -1);
  if (j.contains("delta")) s.delta = number(j["delta"], "delta");
  s.path = j.value("path", "");
  if (s.type == SeedSpec::Type::File && s.path.empty()) throw ConfigError("file seed needs 'path'");
  if (s.type == SeedSpec::Type::Branch) {
    if (!j.contains("parameter")) throw ConfigError("branch seed needs 'parameter'");
    s.parameter = parse_param(j["parameter"], "parameter");
    if (j.contains("from")) s.from = number(j["from"], "from");
    if (j.contains("min")) s.box_min = number(j["min"], "min");
    if (j.contains("max")) s.box_max = number(j["max"], "max");
    s.direction = j.value("direction", 0);
    if (j.contains("crossing")) {
      const json& c = j["crossing"];
      if (c.is_string() && c.get<std::string>() == "all") s.crossing = 0;
      else if (c.is_number_integer() && c.get<int>() >= 1) s.crossing = c.get<int>();
      else throw ConfigError("'crossing' must be a positive integer or \"all\"");
    }
    s.modulo_2pi = j.value("modulo_2pi", false);
    s.require_index = j.value("require_index", -1);
    if (j.contains("start")) s.start = std::make_shared<SeedSpec>(parse_seed(j["start"]));
  }
  return s;
}

ElasticaParams seed_params(const ScenarioConfig& config, const SeedSpec& spec) {
  ElasticaParams p = config.params;
  set_parameter(p, config.sweep.parameter, config.sweep.start);
  for (const auto& [kind, value] : spec.overrides) set_parameter(p, kind, value);
  return p;
}

ContinuationSettings base_settings(const ScenarioConfig& config) {
  ContinuationSettings s = config.settings;
  s.param_kind = config.sweep.parameter;
  s.xi_start = config.sweep.start;
  s.xi_end = config.sweep.end;
  s.xi_min = config.sweep.min.value_or(std::numeric_limits<double>::quiet_NaN());
  s.xi_max = config.sweep.max.value_or(std::numeric_limits<double>::quiet_NaN());
  s.direction = config.sweep.direction;
  return s;
}

EquilibriumState solve_or_throw(const EquilibriumState& guess, const ElasticaParams& p, const ContinuationSettings& s,
                                const std::string& what) {
  NewtonSettings ns;
  ns.tol_residual = s.corrector.tol_residual;
  auto [state, report] = newton_solve(guess, p, ns);
  if (!report.converged) {
    std::ostringstream msg;
    msg << what << ": Newton did not converge (residual " << report.final_residual << ")";
    throw SolverFailure(msg.str());
  }
  return state;
}

// Linear interpolation of nodal angles onto another mesh.
std::vector<double> resample(const std::vector<double>& theta, const Mesh& mesh) {
  const std::size_t m = theta.size();
  std::vector<double> out(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double x = mesh.node(i) * static_cast<double>(m - 1);
    const std::size_t k = std::min(static_cast<std::size_t>(x), m - 2);
    const double w = x - static_cast<double>(k);
    out[i] = (1.0 - w) * theta[k] + w * theta[k + 1];
  }
  return out;
}

double state_distance(const EquilibriumState& a, const EquilibriumState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.theta.size(); ++i) d = std::max(d, std::abs(a.theta[i] - b.theta[i]));
  return d;
}

bool same_fixed_params(const Branch& a, const Branch& b) {
  if (a.kind != b.kind) return false;
  for (OrdinateKind k : {OrdinateKind::Psi, OrdinateKind::Epsilon, OrdinateKind::Alpha, OrdinateKind::LoadP,
                         OrdinateKind::Theta0}) {
    if (k == a.kind) continue;
    if (std::abs(parameter_value(a.params, k) - parameter_value(b.params, k)) > 1e-12) return false;
  }
  return true;
}

// Crossings of `target` (and target + 2 pi k when periodic) along a list of
// points, polished by Newton at exactly `target`.
std::vector<SnapTarget> polished_crossings(const std::vector<BranchPoint>& pts, OrdinateKind kind,
                                           const ElasticaParams& base, double target, bool periodic,
                                           std::size_t branch_id) {
  std::vector<SnapTarget> out;
  if (pts.size() < 2) return out;
  double lo = pts.front().xi;
  double hi = lo;
  for (const auto& p : pts) {
    lo = std::min(lo, p.xi);
    hi = std::max(hi, p.xi);
  }
  int k_lo = 0;
  int k_hi = 0;
  if (periodic) {
    k_lo = static_cast<int>(std::floor((lo - target) / kTwoPi));
    k_hi = static_cast<int>(std::ceil((hi - target) / kTwoPi));
  }
  ElasticaParams p = base;
  set_parameter(p, kind, target);
  NewtonSettings ns;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const BranchPoint& a = pts[i];
    const BranchPoint& b = pts[i + 1];
    for (int k = k_lo; k <= k_hi; ++k) {
      const double t = target + kTwoPi * k;
      const double da = a.xi - t;
      const double db = b.xi - t;
      if (da * db > 0.0 || a.xi == b.xi) continue;
      // A crossing exactly at a shared point is counted on the earlier segment.
      if (db == 0.0 && i + 2 < pts.size()) continue;
      const double w = da / (a.xi - b.xi);
      // The clamp angle shifts the whole field; other angles leave it alone.
      const double shift = kind == OrdinateKind::Theta0 ? t - target : 0.0;
      std::vector<double> theta(a.state.theta.size());
      for (std::size_t n = 0; n < theta.size(); ++n) {
        theta[n] = (1.0 - w) * a.state.theta[n] + w * b.state.theta[n] - shift;
      }
      auto [state, report] = newton_solve(make_state(a.state.mesh, std::move(theta), p), p, ns);
      if (!report.converged) continue;
      const bool dup = std::any_of(out.begin(), out.end(),
                                   [&](const SnapTarget& s) { return state_distance(s.state, state) < 1e-6; });
      if (dup) continue;
      SnapTarget tgt;
      tgt.branch = branch_id;
      tgt.segment = i;
      tgt.xi = t;
      tgt.ordinate = ordinate(state, p, kind);
      tgt.state = std::move(state);
      out.push_back(std::move(tgt));
    }
  }
  return out;
}

// Joins a branch traced backwards from the seed with one traced forwards.
Branch stitch(Branch backward, Branch forward) {
  Branch out;
  out.kind = forward.kind;
  out.params = forward.params;
  const std::size_t nb = backward.points.size();
  auto flip = [](BranchPoint& p) {
    p.tau = -p.tau;
    for (double& v : p.tangent) v = -v;
    p.xi_dot = -p.xi_dot;
    p.det_sign = -p.det_sign;
  };
  for (std::size_t j = nb; j-- > 1;) {
    BranchPoint p = std::move(backward.points[j]);
    flip(p);
    out.points.push_back(std::move(p));
  }
  const std::size_t offset = out.points.size();
  for (auto& p : forward.points) out.points.push_back(std::move(p));

  auto remap = [&](std::size_t j) { return nb - 1 - j; };
  for (std::size_t f = backward.folds.size(); f-- > 0;) {
    FoldRecord r = std::move(backward.folds[f]);
    const std::size_t prev = r.prev_point;
    r.prev_point = remap(r.next_point);
    r.next_point = remap(prev);
    r.tau_star = -r.tau_star;
    r.ordinate_slope = -r.ordinate_slope;
    r.ordinate_slope_sign = -r.ordinate_slope_sign;
    r.mu_dot_sign = -r.mu_dot_sign;
    std::swap(r.index_before, r.index_after);
    std::swap(r.oracle_index_before, r.oracle_index_after);
    std::swap(r.mu_before, r.mu_after);
    std::swap(r.before, r.after);
    for (BranchPoint* p : {&r.at_fold, &r.before, &r.after}) {
      if (!p->tangent.empty()) flip(*p);
    }
    out.folds.push_back(std::move(r));
  }
  for (auto& r : forward.folds) {
    r.prev_point += offset;
    r.next_point += offset;
    out.folds.push_back(std::move(r));
  }

  out.status = forward.status;
  if (backward.status == BranchStatus::Aborted) out.status = BranchStatus::Aborted;
  std::string diag;
  if (!backward.diagnostics.empty()) diag += "backward: " + backward.diagnostics;
  if (!forward.diagnostics.empty()) diag += (diag.empty() ? "" : "; ") + std::string("forward: ") + forward.diagnostics;
  out.diagnostics = diag;
  return out;
}

Branch trace_seed(const ScenarioConfig& config, const Seed& seed) {
  ContinuationSettings s = base_settings(config);
  if (!config.sweep.both_directions) return trace_branch(seed.state, seed.params, s, seed.index);
  ContinuationSettings fwd = s;
  fwd.direction = sign_of(config.sweep.end - config.sweep.start);
  ContinuationSettings bwd = s;
  bwd.direction = -fwd.direction;
  Branch b = trace_branch(seed.state, seed.params, bwd, seed.index);
  Branch f = trace_branch(seed.state, seed.params, fwd, seed.index);
  return stitch(std::move(b), std::move(f));
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::RotateArm: return "rotate-arm";
    case ScenarioKind::VaryArmLength: return "vary-arm-length";
    case ScenarioKind::RotateLoad: return "rotate-load";
    case ScenarioKind::VaryLoad: return "vary-load";
    case ScenarioKind::RotateClamp: return "rotate-clamp";
  }
  return "rotate-arm";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  for (ScenarioKind k : {ScenarioKind::RotateArm, ScenarioKind::VaryArmLength, ScenarioKind::RotateLoad,
                         ScenarioKind::VaryLoad, ScenarioKind::RotateClamp}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

OrdinateKind sweep_parameter(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::RotateArm: return OrdinateKind::Psi;
    case ScenarioKind::VaryArmLength: return OrdinateKind::Epsilon;
    case ScenarioKind::RotateLoad: return OrdinateKind::Alpha;
    case ScenarioKind::VaryLoad: return OrdinateKind::LoadP;
    case ScenarioKind::RotateClamp: return OrdinateKind::Theta0;
  }
  return OrdinateKind::Psi;
}

double evaluate_expression(const std::string& text) { return ExpressionParser(text).parse(); }

ScenarioConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"name", "scenario", "load", "alpha", "epsilon", "psi", "theta0", "sweep", "mesh", "ds_init",
                  "ds_min", "ds_max", "max_steps", "tol_residual", "out", "seeds", "labels", "save_points_at",
                  "periodicity", "svg"},
                 "config");

  ScenarioConfig c;
  try {
    if (!j.contains("scenario")) throw ConfigError("config needs 'scenario'");
    c.scenario = parse_scenario_kind(j["scenario"].get<std::string>());
    c.name = j.value("name", to_string(c.scenario));
    const std::pair<const char*, OrdinateKind> fields[] = {{"load", OrdinateKind::LoadP},
                                                           {"alpha", OrdinateKind::Alpha},
                                                           {"epsilon", OrdinateKind::Epsilon},
                                                           {"psi", OrdinateKind::Psi},
                                                           {"theta0", OrdinateKind::Theta0}};
    for (const auto& [key, kind] : fields) {
      if (j.contains(key)) set_parameter(c.params, kind, number(j[key], key));
    }

    if (!j.contains("sweep") || !j["sweep"].is_object()) throw ConfigError("config needs a 'sweep' object");
    const json& sw = j["sweep"];
    reject_unknown(sw, {"parameter", "start", "end", "min", "max", "direction", "both_directions"}, "sweep");
    c.sweep.parameter = sweep_parameter(c.scenario);
    if (sw.contains("parameter") && parse_param(sw["parameter"], "sweep.parameter") != c.sweep.parameter) {
      throw ConfigError("sweep parameter does not match scenario " + to_string(c.scenario));
    }
    if (!sw.contains("start") || !sw.contains("end")) throw ConfigError("sweep needs 'start' and 'end'");
    c.sweep.start = number(sw["start"], "sweep.start");
    c.sweep.end = number(sw["end"], "sweep.end");
    if (sw.contains("min")) c.sweep.min = number(sw["min"], "sweep.min");
    if (sw.contains("max")) c.sweep.max = number(sw["max"], "sweep.max");
    c.sweep.direction = sw.value("direction", 0);
    c.sweep.both_directions = sw.value("both_directions", false);

    const int mesh = j.value("mesh", 201);
    if (mesh < 3) throw ConfigError("mesh needs at least 3 nodes");
    c.mesh = static_cast<std::size_t>(mesh);
    if (j.contains("ds_init")) c.settings.ds_init = number(j["ds_init"], "ds_init");
    if (j.contains("ds_min")) c.settings.ds_min = number(j["ds_min"], "ds_min");
    if (j.contains("ds_max")) c.settings.ds_max = number(j["ds_max"], "ds_max");
    c.settings.max_steps = j.value("max_steps", c.settings.max_steps);
    if (j.contains("tol_residual")) c.settings.corrector.tol_residual = number(j["tol_residual"], "tol_residual");
    c.out = j.value("out", "out");
    if (j.contains("seeds")) {
      if (!j["seeds"].is_array()) throw ConfigError("'seeds' must be a list");
      for (const json& s : j["seeds"]) c.seeds.push_back(parse_seed(s));
    }
    if (c.seeds.empty()) c.seeds.push_back(SeedSpec{});
    for (const char* key : {"labels", "save_points_at"}) {
      if (!j.contains(key)) continue;
      if (!j[key].is_array()) throw ConfigError(std::string("'") + key + "' must be a list");
      auto& dst = std::string(key) == "labels" ? c.labels : c.save_points_at;
      for (const json& v : j[key]) dst.push_back(number(v, key));
    }
    c.periodicity = j.value("periodicity", false);
    c.svg = j.value("svg", true);
  } catch (const json::type_error& e) {
    throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
  }
  if (!c.params.finite()) throw ConfigError("parameters must be finite");

  ContinuationSettings check = base_settings(c);
  try {
    check.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.settings = check;
  c.echo = j.dump(2);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void save_point(const std::string& path, const StoredPoint& point) {
  json j;
  j["params"] = {{"load", point.params.load},
                 {"alpha", point.params.alpha},
                 {"epsilon", point.params.epsilon},
                 {"psi", point.params.psi},
                 {"theta0", point.params.theta0}};
  j["parameter"] = std::string(to_string(point.kind));
  j["xi"] = point.xi;
  j["index"] = point.index;
  j["theta"] = point.theta;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(1) << '\n';
}

StoredPoint load_point(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read point file '" + path + "'");
  try {
    const json j = json::parse(in);
    StoredPoint p;
    const json& q = j.at("params");
    p.params = {q.at("load").get<double>(), q.at("alpha").get<double>(), q.at("epsilon").get<double>(),
                q.at("psi").get<double>(), q.at("theta0").get<double>()};
    p.kind = parse_ordinate_kind(j.at("parameter").get<std::string>());
    p.xi = j.at("xi").get<double>();
    p.index = j.value("index", -1);
    p.theta = j.at("theta").get<std::vector<double>>();
    if (p.theta.size() < 3) throw ConfigError("point file '" + path + "' has fewer than 3 nodes");
    return p;
  } catch (const json::exception& e) {
    throw ConfigError("malformed point file '" + path + "': " + e.what());
  }
}

std::vector<Seed> make_seeds(const ScenarioConfig& config, const SeedSpec& spec) {
  const Mesh mesh(config.mesh);
  const ElasticaParams p = seed_params(config, spec);
  const ContinuationSettings settings = base_settings(config);
  std::vector<Seed> out;

  auto finish = [&](EquilibriumState state, const std::string& origin, int analytic) {
    Seed s;
    s.label = spec.label;
    s.params = p;
    s.origin = origin;
    if (spec.index >= 0) s.index = spec.index;
    else if (analytic >= 0) s.index = analytic;
    else s.index = spectrum_at(state, p).index;
    s.state = std::move(state);
    out.push_back(std::move(s));
  };

  switch (spec.type) {
    case SeedSpec::Type::Straight: {
      EquilibriumState st = straight_state(mesh, p);
      if (max_norm(assemble_residual(st.theta, mesh, p)) > settings.corrector.tol_residual) {
        st = solve_or_throw(st, p, settings, "straight seed '" + spec.label + "'");
      }
      int analytic = -1;
      const bool symmetric = std::abs(std::remainder(p.alpha + p.theta0, kTwoPi)) < 1e-12 &&
                             std::abs(std::remainder(p.psi, kTwoPi)) < 1e-12;
      if (symmetric && state_distance(st, straight_state(mesh, p)) < 1e-12) {
        try {
          analytic = straight_branch_index(p.load, p.epsilon);
        } catch (const AtBifurcation&) {
          analytic = -1;
        }
      }
      finish(std::move(st), analytic >= 0 ? "straight (analytic index)" : "straight", analytic);
      break;
    }
    case SeedSpec::Type::Buckled: {
      std::vector<double> theta(mesh.size());
      for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] = p.theta0 + spec.delta * std::sin(0.5 * std::numbers::pi * mesh.node(i));
      }
      finish(solve_or_throw(make_state(mesh, std::move(theta), p), p, settings, "buckled seed '" + spec.label + "'"),
             "buckled", -1);
      break;
    }
    case SeedSpec::Type::File: {
      const StoredPoint stored = load_point(spec.path);
      finish(solve_or_throw(make_state(mesh, resample(stored.theta, mesh), p), p, settings,
                            "file seed '" + spec.path + "'"),
             "file " + spec.path, -1);
      break;
    }
    case SeedSpec::Type::Branch: {
      const double target = parameter_value(p, spec.parameter);
      ElasticaParams aux_params = p;
      set_parameter(aux_params, spec.parameter, spec.from);
      EquilibriumState start = straight_state(mesh, aux_params);
      if (!spec.path.empty()) start = make_state(mesh, resample(load_point(spec.path).theta, mesh), aux_params);
      if (spec.start) {
        ScenarioConfig nested = config;
        nested.params = aux_params;
        nested.sweep.start = parameter_value(aux_params, config.sweep.parameter);
        std::vector<Seed> first = make_seeds(nested, *spec.start);
        if (first.empty()) throw SolverFailure("start stage of seed '" + spec.label + "' produced nothing");
        start = std::move(first.front().state);
      }
      start = solve_or_throw(start, aux_params, settings, "auxiliary start of seed '" + spec.label + "'");

      ContinuationSettings aux = settings;
      aux.param_kind = spec.parameter;
      aux.xi_start = spec.from;
      aux.xi_end = target;
      aux.xi_min = spec.box_min.value_or(std::numeric_limits<double>::quiet_NaN());
      aux.xi_max = spec.box_max.value_or(std::numeric_limits<double>::quiet_NaN());
      aux.direction = spec.direction;
      if (aux.xi_start == aux.xi_end) {
        throw ConfigError("branch seed '" + spec.label + "' starts at its target value");
      }
      const Branch path = trace_branch(start, aux_params, aux);
      if (path.points.size() < 2) throw SolverFailure("auxiliary continuation for seed '" + spec.label + "' failed: " + path.diagnostics);

      std::vector<SnapTarget> hits = polished_crossings(path.points, spec.parameter, p, target, spec.modulo_2pi, 0);
      int taken = 0;
      int counted = 0;
      for (SnapTarget& h : hits) {
        const int idx = spectrum_at(h.state, p).index;
        if (spec.require_index >= 0 && idx != spec.require_index) continue;
        ++counted;
        if (spec.crossing != 0 && counted != spec.crossing) continue;
        std::ostringstream origin;
        origin << "continuation in " << to_string(spec.parameter) << " from " << spec.from << ", crossing " << counted;
        finish(std::move(h.state), origin.str(), -1);
        if (spec.crossing == 0) out.back().label = spec.label + "#" + std::to_string(counted);
        ++taken;
      }
      if (taken == 0) {
        throw SolverFailure("auxiliary continuation for seed '" + spec.label + "' never reached " +
                            std::string(to_string(spec.parameter)) + " = " + std::to_string(target) +
                            (path.diagnostics.empty() ? "" : " (" + path.diagnostics + ")"));
      }
      break;
    }
  }
  return out;
}

ElasticaParams branch_params(const Branch& branch, double xi) {
  ElasticaParams p = branch.params;
  set_parameter(p, branch.kind, xi);
  return p;
}

std::vector<SnapTarget> crossings_at(const BranchArtifact& artifact, std::size_t branch, double xi, bool periodic) {
  const Branch& b = artifact.branches.at(branch);
  return polished_crossings(b.points, b.kind, b.params, xi, periodic, branch);
}

std::vector<SnapPair> snap_pairs(const BranchArtifact& artifact) {
  std::vector<SnapPair> out;
  for (std::size_t bi = 0; bi < artifact.branches.size(); ++bi) {
    const Branch& b = artifact.branches[bi];
    const bool periodic = is_angle(b.kind);
    for (std::size_t fi = 0; fi < b.folds.size(); ++fi) {
      const FoldRecord& f = b.folds[fi];
      if (f.kind != SingularityKind::Fold) continue;
      if (f.oracle_index_before != 0 && f.oracle_index_after != 0) continue;
      SnapPair pair;
      pair.branch = bi;
      pair.fold = fi;
      pair.xi = f.xi_star;
      const ElasticaParams p = branch_params(b, f.xi_star);
      for (std::size_t ci = 0; ci < artifact.branches.size(); ++ci) {
        if (!same_fixed_params(b, artifact.branches[ci])) continue;
        for (SnapTarget& t : crossings_at(artifact, ci, f.xi_star, periodic)) {
          if (spectrum_at(t.state, p).index != 0) continue;
          if (state_distance(t.state, f.at_fold.state) < 1e-4) continue;
          const bool dup = std::any_of(pair.targets.begin(), pair.targets.end(), [&](const SnapTarget& s) {
            return state_distance(s.state, t.state) < 1e-6;
          });
          if (!dup) pair.targets.push_back(std::move(t));
        }
      }
      pair.unresolved = pair.targets.empty();
      out.push_back(std::move(pair));
    }
  }
  return out;
}

PeriodicityReport periodicity_check(const Branch& branch, std::size_t branch_id, int samples) {
  PeriodicityReport rep;
  rep.branch = branch_id;
  rep.max_defect = std::numeric_limits<double>::infinity();
  const auto& pts = branch.points;
  if (pts.size() < 2 || (branch.kind != OrdinateKind::Psi && branch.kind != OrdinateKind::Alpha)) return rep;
  double lo = pts.front().xi;
  double hi = lo;
  for (const BranchPoint& p : pts) {
    lo = std::min(lo, p.xi);
    hi = std::max(hi, p.xi);
  }
  if (hi - lo <= kTwoPi) return rep;

  auto tau_of = [&](const SnapTarget& t) {
    const BranchPoint& a = pts[t.segment];
    const BranchPoint& b = pts[t.segment + 1];
    const double w = a.xi == b.xi ? 0.0 : (t.xi - a.xi) / (b.xi - a.xi);
    return a.tau + w * (b.tau - a.tau);
  };
  struct Pair {
    double tau = 0.0;
    double best = 0.0;
    double shift = 0.0;
  };
  std::vector<Pair> pairs;
  for (int j = 0; j < samples; ++j) {
    const double xi = lo + (hi - lo - kTwoPi) * (j + 0.5) / samples;
    const auto here = polished_crossings(pts, branch.kind, branch.params, xi, false, branch_id);
    const auto there = polished_crossings(pts, branch.kind, branch.params, xi + kTwoPi, false, branch_id);
    for (const SnapTarget& a : here) {
      Pair p{tau_of(a), std::numeric_limits<double>::infinity(), 0.0};
      for (const SnapTarget& b : there) {
        const double d = state_distance(a.state, b.state);
        if (d < p.best) p.best = d, p.shift = tau_of(b) - p.tau;
      }
      pairs.push_back(p);
    }
  }
  // The translate of a point lies one period T further along the branch;
  // points whose translate was never traced cannot be compared.
  std::vector<double> shifts;
  for (const Pair& p : pairs) {
    if (p.best < 1e-6) shifts.push_back(p.shift);
  }
  if (shifts.empty()) {
    for (const Pair& p : pairs) rep.max_defect = std::min(rep.max_defect, p.best);
    return rep;
  }
  std::nth_element(shifts.begin(), shifts.begin() + shifts.size() / 2, shifts.end());
  const double period = shifts[shifts.size() / 2];
  const double margin = 0.5 * std::abs(period) / static_cast<double>(pts.size());
  rep.max_defect = 0.0;
  for (const Pair& p : pairs) {
    const double target = p.tau + period;
    if (target < pts.front().tau + margin || target > pts.back().tau - margin) continue;
    rep.max_defect = std::max(rep.max_defect, p.best);
    ++rep.compared;
  }
  return rep;
}

BranchArtifact run_scenario(const ScenarioConfig& config) {
  BranchArtifact art;
  art.config = config;
  art.created = timestamp();

  for (const SeedSpec& spec : config.seeds) {
    try {
      for (Seed& s : make_seeds(config, spec)) art.seeds.push_back(std::move(s));
    } catch (const SolverFailure& e) {
      art.diagnostics.push_back(e.what());
    }
  }
  if (art.seeds.empty()) {
    std::string why = "no seed converged";
    for (const auto& d : art.diagnostics) why += "; " + d;
    throw SolverFailure(why);
  }

  std::vector<std::future<Branch>> jobs;
  for (const Seed& s : art.seeds) {
    jobs.push_back(std::async(std::launch::async, [&config, &s] { return trace_seed(config, s); }));
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    art.branches.push_back(jobs[i].get());
    const Branch& b = art.branches.back();
    if (b.status == BranchStatus::Aborted) {
      art.diagnostics.push_back("branch " + std::to_string(i) + " (" + art.seeds[i].label + ") aborted: " + b.diagnostics);
    }
  }

  art.snaps = snap_pairs(art);
  if (config.periodicity) {
    for (std::size_t bi = 0; bi < art.branches.size(); ++bi) {
      if (is_angle(art.branches[bi].kind)) art.periodicity.push_back(periodicity_check(art.branches[bi], bi));
    }
  }

  for (double label : config.labels) {
    for (std::size_t bi = 0; bi < art.branches.size(); ++bi) {
      const Branch& b = art.branches[bi];
      for (SnapTarget& t : crossings_at(art, bi, label, is_angle(b.kind))) {
        LabeledShape shape;
        shape.branch = bi;
        shape.segment = t.segment;
        shape.xi = t.xi;
        shape.ordinate = t.ordinate;
        shape.index = spectrum_at(t.state, branch_params(b, label)).index;
        shape.centerline = reconstruct_centerline(t.state);
        art.shapes.push_back(std::move(shape));
      }
    }
  }
  return art;
}

}  // namespace elastica
