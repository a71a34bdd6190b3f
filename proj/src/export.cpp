#include "elastica/export.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "elastica/stability.hpp"
#include "elastica/svg.hpp"

namespace elastica {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <std::size_t N>
void write_header(std::ostream& out, const std::array<const char*, N>& cols) {
  for (std::size_t i = 0; i < N; ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

std::string classification_name(Classification c) {
  switch (c) {
    case Classification::Pending: return "pending";
    case Classification::Classified: return "classified";
    case Classification::Degenerate: return "degenerate";
  }
  return "pending";
}

Classification parse_classification(const std::string& s) {
  if (s == "classified") return Classification::Classified;
  if (s == "degenerate") return Classification::Degenerate;
  return Classification::Pending;
}

json params_json(const ElasticaParams& p) {
  return {{"load", p.load}, {"alpha", p.alpha}, {"epsilon", p.epsilon}, {"psi", p.psi}, {"theta0", p.theta0}};
}

ElasticaParams params_from(const json& j) {
  return {j.at("load").get<double>(), j.at("alpha").get<double>(), j.at("epsilon").get<double>(),
          j.at("psi").get<double>(), j.at("theta0").get<double>()};
}

// NaN is not representable in JSON; store it as null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json point_json(const BranchPoint& p) {
  if (p.state.theta.empty()) return nullptr;
  return {{"tau", p.tau}, {"xi", p.xi}, {"index", p.index}, {"theta", p.state.theta}, {"tangent", p.tangent}};
}

BranchPoint point_from(const json& j, const Branch& branch) {
  BranchPoint p;
  if (j.is_null()) return p;
  p.tau = j.at("tau").get<double>();
  p.xi = j.at("xi").get<double>();
  p.index = j.value("index", -1);
  std::vector<double> theta = j.at("theta").get<std::vector<double>>();
  const Mesh mesh(theta.size());
  p.state = make_state(mesh, std::move(theta), branch_params(branch, p.xi));
  p.tangent = j.value("tangent", std::vector<double>{});
  if (!p.tangent.empty()) p.xi_dot = p.tangent.back();
  return p;
}

json fold_json(const FoldRecord& f) {
  return {{"kind", to_string(f.kind)},
          {"prev_point", f.prev_point},
          {"next_point", f.next_point},
          {"tau_star", f.tau_star},
          {"xi_star", f.xi_star},
          {"xi_ddot_sign", f.xi_ddot_sign},
          {"ordinate_slope", f.ordinate_slope},
          {"ordinate_slope_sign", f.ordinate_slope_sign},
          {"mu_dot_sign", f.mu_dot_sign},
          {"index_before", f.index_before},
          {"index_after", f.index_after},
          {"classification", classification_name(f.classification)},
          {"verdict", to_string(f.verdict)},
          {"mu_at_fold", num(f.mu_at_fold)},
          {"mu_before", num(f.mu_before)},
          {"mu_after", num(f.mu_after)},
          {"oracle_index_before", f.oracle_index_before},
          {"oracle_index_after", f.oracle_index_after},
          {"mode_alignment", num(f.mode_alignment)},
          {"note", f.note},
          {"states", {{"at_fold", point_json(f.at_fold)}, {"before", point_json(f.before)}, {"after", point_json(f.after)}}}};
}

std::string stem(const BranchArtifact& a, std::size_t b) { return a.config.name + "_b" + std::to_string(b); }

void write_file(const fs::path& path, const std::string& text, std::vector<std::string>& files) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  files.push_back(path.string());
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_branch_csv(std::ostream& out, const Branch& branch) {
  write_header(out, kBranchColumns);
  for (const BranchPoint& p : branch.points) {
    const EquilibriumState& s = p.state;
    out << format_double(p.tau) << ',' << format_double(p.xi) << ',' << format_double(p.ordinate) << ',' << p.index
        << ',' << format_double(s.theta.front()) << ',' << format_double(s.theta.back()) << ','
        << format_double(s.theta_prime_0) << ',' << format_double(s.theta_prime_1) << ',' << format_double(s.x1) << ','
        << format_double(s.y1) << ',' << format_double(s.energy) << '\n';
  }
}

void write_folds_csv(std::ostream& out, const Branch& branch) {
  write_header(out, kFoldColumns);
  for (const FoldRecord& f : branch.folds) {
    out << format_double(f.tau_star) << ',' << format_double(f.xi_star) << ',' << f.xi_ddot_sign << ','
        << f.ordinate_slope_sign << ',' << f.index_before << ',' << f.index_after << ','
        << format_double(f.mu_at_fold) << ',' << to_string(f.verdict) << '\n';
  }
}

void write_derived_csv(std::ostream& out, const Branch& branch) {
  out << "tau,xi_mod_2pi,predicted_index\n";
  const bool angle = is_angle(branch.kind);
  for (const BranchPoint& p : branch.points) {
    double xi = p.xi;
    if (angle) {
      xi = std::fmod(xi, 2.0 * std::numbers::pi);
      if (xi < 0.0) xi += 2.0 * std::numbers::pi;
    }
    out << format_double(p.tau) << ',' << format_double(xi) << ',' << p.predicted_index << '\n';
  }
}

std::vector<BranchRow> read_branch_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty branch CSV");
  std::string expected;
  for (std::size_t i = 0; i < kBranchColumns.size(); ++i) expected += (i ? "," : "") + std::string(kBranchColumns[i]);
  if (line != expected) throw std::runtime_error("unexpected branch CSV header: " + line);

  std::vector<BranchRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 11> v{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t k = 0; k < v.size(); ++k) {
      const auto res = std::from_chars(p, end, v[k]);
      if (res.ec != std::errc()) throw std::runtime_error("bad number in branch CSV: " + line);
      p = res.ptr;
      if (k + 1 < v.size()) {
        if (p == end || *p != ',') throw std::runtime_error("missing field in branch CSV: " + line);
        ++p;
      }
    }
    if (p != end) throw std::runtime_error("trailing data in branch CSV: " + line);
    rows.push_back({v[0], v[1], v[2], static_cast<int>(v[3]), v[4], v[5], v[6], v[7], v[8], v[9], v[10]});
  }
  return rows;
}

WrittenArtifact write_artifact(const BranchArtifact& a, const std::string& out_dir, bool svg) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  WrittenArtifact written;

  json manifest;
  manifest["format"] = "elastica-branch-artifact";
  manifest["version"] = 1;
  manifest["generator"] = "elastica 1.0.0";
  manifest["created"] = a.created;
  manifest["name"] = a.config.name;
  manifest["scenario"] = to_string(a.config.scenario);
  manifest["parameter"] = std::string(to_string(a.config.sweep.parameter));
  manifest["mesh"] = a.config.mesh;
  manifest["config"] = a.config.echo.empty() ? json(nullptr) : json::parse(a.config.echo);

  json seeds = json::array();
  for (const Seed& s : a.seeds) {
    seeds.push_back({{"label", s.label}, {"origin", s.origin}, {"index", s.index}, {"params", params_json(s.params)}});
  }
  manifest["seeds"] = seeds;

  json branches = json::array();
  for (std::size_t b = 0; b < a.branches.size(); ++b) {
    const Branch& br = a.branches[b];
    const std::string base = stem(a, b);
    std::ostringstream csv, folds, derived;
    write_branch_csv(csv, br);
    write_folds_csv(folds, br);
    write_derived_csv(derived, br);
    write_file(dir / (base + ".csv"), csv.str(), written.files);
    write_file(dir / (base + "_folds.csv"), folds.str(), written.files);
    write_file(dir / (base + "_derived.csv"), derived.str(), written.files);

    json fj = json::array();
    for (const FoldRecord& f : br.folds) fj.push_back(fold_json(f));
    branches.push_back({{"id", b},
                        {"seed", b < a.seeds.size() ? a.seeds[b].label : ""},
                        {"parameter", std::string(to_string(br.kind))},
                        {"params", params_json(br.params)},
                        {"status", to_string(br.status)},
                        {"diagnostics", br.diagnostics},
                        {"points", br.points.size()},
                        {"csv", base + ".csv"},
                        {"folds_csv", base + "_folds.csv"},
                        {"derived_csv", base + "_derived.csv"},
                        {"folds", fj}});
  }
  manifest["branches"] = branches;

  json snaps = json::array();
  for (const SnapPair& s : a.snaps) {
    json targets = json::array();
    for (const SnapTarget& t : s.targets) {
      targets.push_back({{"branch", t.branch}, {"segment", t.segment}, {"xi", t.xi}, {"ordinate", t.ordinate}});
    }
    snaps.push_back({{"branch", s.branch}, {"fold", s.fold}, {"xi", s.xi}, {"unresolved", s.unresolved}, {"targets", targets}});
  }
  manifest["snaps"] = snaps;

  json shapes = json::array();
  for (const LabeledShape& s : a.shapes) {
    std::vector<double> xs, ys;
    for (const Point2& p : s.centerline) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    shapes.push_back({{"branch", s.branch}, {"xi", s.xi}, {"ordinate", s.ordinate}, {"index", s.index}, {"x", xs}, {"y", ys}});
  }
  manifest["shapes"] = shapes;
  json periodicity = json::array();
  for (const PeriodicityReport& r : a.periodicity) {
    periodicity.push_back({{"branch", r.branch}, {"compared", r.compared}, {"max_defect", num(r.max_defect)}});
  }
  manifest["periodicity"] = periodicity;

  json saved = json::array();
  for (std::size_t j = 0; j < a.config.save_points_at.size(); ++j) {
    const double xi = a.config.save_points_at[j];
    for (std::size_t b = 0; b < a.branches.size(); ++b) {
      const Branch& br = a.branches[b];
      const auto hits = crossings_at(a, b, xi, is_angle(br.kind));
      for (std::size_t m = 0; m < hits.size(); ++m) {
        StoredPoint sp;
        sp.params = branch_params(br, xi);
        sp.kind = br.kind;
        sp.xi = xi;
        sp.index = spectrum_at(hits[m].state, sp.params).index;
        sp.theta = hits[m].state.theta;
        const std::string file = stem(a, b) + "_point" + std::to_string(j) + "_" + std::to_string(m) + ".json";
        save_point((dir / file).string(), sp);
        written.files.push_back((dir / file).string());
        saved.push_back({{"file", file}, {"branch", b}, {"xi", xi}, {"index", sp.index}});
      }
    }
  }
  manifest["saved_points"] = saved;
  manifest["diagnostics"] = a.diagnostics;

  if (svg && !a.branches.empty()) {
    SvgStyle style;
    style.title = a.config.name;
    write_file(dir / (a.config.name + ".svg"), render_svg(a, style), written.files);
    manifest["svg"] = a.config.name + ".svg";
  }

  const fs::path mpath = dir / (a.config.name + ".json");
  write_file(mpath, manifest.dump(1) + "\n", written.files);
  written.manifest = mpath.string();
  return written;
}

ValidationSummary validate_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot read manifest '" + manifest_path + "'");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (m.value("format", "") != "elastica-branch-artifact") throw std::runtime_error("not an elastica artifact manifest");

  ValidationSummary summary;
  for (const json& bj : m.at("branches")) {
    Branch branch;
    branch.kind = parse_ordinate_kind(bj.at("parameter").get<std::string>());
    branch.params = params_from(bj.at("params"));
    std::size_t k = 0;
    for (const json& fj : bj.at("folds")) {
      FoldRecord f;
      f.kind = fj.at("kind").get<std::string>() == "fold" ? SingularityKind::Fold : SingularityKind::UnresolvedSingularity;
      f.prev_point = fj.at("prev_point").get<std::size_t>();
      f.next_point = fj.at("next_point").get<std::size_t>();
      f.tau_star = fj.at("tau_star").get<double>();
      f.xi_star = fj.at("xi_star").get<double>();
      f.xi_ddot_sign = fj.at("xi_ddot_sign").get<int>();
      f.ordinate_slope = fj.at("ordinate_slope").get<double>();
      f.ordinate_slope_sign = fj.at("ordinate_slope_sign").get<int>();
      f.mu_dot_sign = fj.at("mu_dot_sign").get<int>();
      f.index_before = fj.at("index_before").get<int>();
      f.index_after = fj.at("index_after").get<int>();
      f.classification = parse_classification(fj.at("classification").get<std::string>());
      f.note = fj.value("note", "");
      const json& st = fj.at("states");
      f.at_fold = point_from(st.at("at_fold"), branch);
      f.before = point_from(st.at("before"), branch);
      f.after = point_from(st.at("after"), branch);
      const Verdict stored = parse_verdict(fj.at("verdict").get<std::string>());

      const FoldRecord checked = validate_fold(branch, f);
      ++summary.folds;
      switch (checked.verdict) {
        case Verdict::Pass: ++summary.pass; break;
        case Verdict::OracleOnly: ++summary.oracle_only; break;
        case Verdict::Mismatch: ++summary.mismatch; break;
        case Verdict::Unresolved:
        case Verdict::NotChecked: ++summary.unresolved; break;
      }
      std::ostringstream msg;
      msg << "branch " << bj.at("id").get<std::size_t>() << " fold " << k << " at " << format_double(f.xi_star) << ": "
          << to_string(checked.verdict);
      if (checked.verdict != stored) msg << " (manifest says " << to_string(stored) << ")";
      if (!checked.note.empty()) msg << ": " << checked.note;
      summary.messages.push_back(msg.str());
      ++k;
    }
  }
  return summary;
}

}  // namespace elastica
