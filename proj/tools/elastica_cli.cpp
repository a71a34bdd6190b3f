// Command-line front end: scenario runs, buckling tables, straight-rod
// indices and artifact re-validation.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "elastica/buckling.hpp"
#include "elastica/export.hpp"
#include "elastica/scenario.hpp"
#include "elastica/stability.hpp"

namespace {

enum ExitCode { kOk = 0, kSolverFailure = 2, kFoldMismatch = 3, kBadConfig = 4 };

int run_command(const std::string& config_path, const std::string& out, int mesh, double ds_init, bool no_svg) {
  using namespace elastica;
  ScenarioConfig config;
  try {
    config = load_config(config_path);
    if (!out.empty()) config.out = out;
    if (mesh > 0) {
      if (mesh < 3) throw ConfigError("--mesh needs at least 3 nodes");
      config.mesh = static_cast<std::size_t>(mesh);
    }
    if (ds_init > 0.0) {
      config.settings.ds_init = ds_init;
      config.settings.validate();
    }
    if (no_svg) config.svg = false;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kBadConfig;
  }

  BranchArtifact artifact;
  try {
    artifact = run_scenario(config);
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kBadConfig;
  }

  const WrittenArtifact written = write_artifact(artifact, config.out, config.svg);

  int mismatches = 0;
  bool aborted = false;
  std::printf("%s: %zu branch(es)\n", config.name.c_str(), artifact.branches.size());
  for (std::size_t b = 0; b < artifact.branches.size(); ++b) {
    const Branch& br = artifact.branches[b];
    int pass = 0, oracle_only = 0, unresolved = 0, bad = 0;
    for (const FoldRecord& f : br.folds) {
      switch (f.verdict) {
        case Verdict::Pass: ++pass; break;
        case Verdict::OracleOnly: ++oracle_only; break;
        case Verdict::Mismatch: ++bad; break;
        default: ++unresolved;
      }
    }
    mismatches += bad;
    aborted = aborted || br.status == BranchStatus::Aborted;
    std::printf("  branch %zu [%s]: %s, %zu points, folds pass %d, oracle-only %d, mismatch %d, unresolved %d\n", b,
                artifact.seeds[b].label.c_str(), to_string(br.status).c_str(), br.points.size(), pass, oracle_only,
                bad, unresolved);
    if (!br.diagnostics.empty()) std::printf("    %s\n", br.diagnostics.c_str());
    for (const FoldRecord& f : br.folds) {
      if (f.verdict == Verdict::Mismatch) std::printf("    mismatch at %.10g: %s\n", f.xi_star, f.note.c_str());
    }
  }
  for (const SnapPair& s : artifact.snaps) {
    std::printf("  snap from branch %zu fold %zu at %.10g: %zu stable target(s)%s\n", s.branch, s.fold, s.xi,
                s.targets.size(), s.unresolved ? " (unresolved)" : "");
  }
  for (const PeriodicityReport& r : artifact.periodicity) {
    std::printf("  periodicity branch %zu: %d comparison(s), max defect %.3g\n", r.branch, r.compared, r.max_defect);
  }
  for (const std::string& d : artifact.diagnostics) std::printf("  note: %s\n", d.c_str());
  std::printf("manifest: %s\n", written.manifest.c_str());

  if (mismatches > 0) return kFoldMismatch;
  if (aborted || !artifact.diagnostics.empty()) return kSolverFailure;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability of a planar elastica loaded through a rigid arm"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario config and write its artifact");
  std::string config_path, out_dir;
  int mesh = 0;
  double ds_init = 0.0;
  bool no_svg = false;
  run->add_option("config", config_path, "scenario config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--mesh", mesh, "number of mesh nodes");
  run->add_option("--ds-init", ds_init, "initial pseudo-arclength step");
  run->add_flag("--no-svg", no_svg, "skip the SVG diagram");

  auto* crit = app.add_subcommand("criticals", "buckling loads of the straight rod");
  double eps = 0.0;
  int k_max = 5;
  crit->add_option("--epsilon", eps, "arm ratio")->required();
  crit->add_option("--k-max", k_max, "number of modes")->required();

  auto* index = app.add_subcommand("index", "Morse index of the straight rod");
  double load = 0.0;
  double index_eps = 0.0;
  index->add_option("--p", load, "load P")->required();
  index->add_option("--epsilon", index_eps, "arm ratio")->required();

  auto* validate = app.add_subcommand("validate", "re-run the eigenvalue oracle on an artifact's folds");
  std::string manifest;
  validate->add_option("artifact", manifest, "artifact manifest (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }

  if (*run) return run_command(config_path, out_dir, mesh, ds_init, no_svg);

  if (*crit) {
    try {
      const auto table = elastica::critical_loads(eps, k_max);
      std::printf("k,P,sqrt_P\n");
      for (std::size_t k = 0; k < table.roots.size(); ++k) {
        std::printf("%zu,%s,%s\n", k + 1, elastica::format_double(table.roots[k]).c_str(),
                    elastica::format_double(std::sqrt(table.roots[k])).c_str());
      }
      return kOk;
    } catch (const std::invalid_argument& e) {
      std::cerr << "bad arguments: " << e.what() << '\n';
      return kBadConfig;
    }
  }

  if (*index) {
    try {
      std::printf("%d\n", elastica::straight_branch_index(load, index_eps));
      return kOk;
    } catch (const elastica::AtBifurcation& e) {
      std::cerr << e.what() << '\n';
      return kSolverFailure;
    } catch (const std::invalid_argument& e) {
      std::cerr << "bad arguments: " << e.what() << '\n';
      return kBadConfig;
    }
  }

  if (*validate) {
    try {
      const auto summary = elastica::validate_manifest(manifest);
      for (const auto& m : summary.messages) std::printf("%s\n", m.c_str());
      std::printf("folds %d: pass %d, oracle-only %d, mismatch %d, unresolved %d\n", summary.folds, summary.pass,
                  summary.oracle_only, summary.mismatch, summary.unresolved);
      return summary.mismatch > 0 ? kFoldMismatch : kOk;
    } catch (const std::exception& e) {
      std::cerr << "cannot validate: " << e.what() << '\n';
      return kBadConfig;
    }
  }
  return kOk;
}
