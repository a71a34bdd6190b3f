#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "elastica/branch.hpp"
#include "elastica/continuation.hpp"
#include "elastica/model.hpp"

namespace elastica {

enum class ScenarioKind { RotateArm, VaryArmLength, RotateLoad, VaryLoad, RotateClamp };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);
/// The parameter each scenario sweeps.
OrdinateKind sweep_parameter(ScenarioKind kind);

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluates numbers written as arithmetic on `pi`, e.g. "9*pi^2/4" or "-pi/12".
double evaluate_expression(const std::string& text);

struct SweepSpec {
  OrdinateKind parameter = OrdinateKind::Psi;
  double start = 0.0;
  double end = 1.0;
  std::optional<double> min;
  std::optional<double> max;
  int direction = 0;
  /// Trace away from the seed in both directions and join the halves.
  bool both_directions = false;
};

struct SeedSpec {
  enum class Type { Straight, Buckled, File, Branch };
  Type type = Type::Straight;
  std::string label;
  /// Parameter values replacing the scenario's for this seed and its branch.
  std::map<OrdinateKind, double> overrides;
  /// Imposed index; negative means analytic for straight seeds, oracle otherwise.
  int index = -1;

  double delta = 0.05;  ///< Buckled: amplitude of delta sin(pi s / 2)
  std::string path;     ///< File: a saved branch point

  // Branch: auxiliary continuation in `parameter` from `from` (starting at the
  // straight state, at the file in `path`, or at the first state produced by
  // `start`) until it crosses the seed's value of that parameter.
  OrdinateKind parameter = OrdinateKind::LoadP;
  double from = 0.0;
  std::optional<double> box_min;
  std::optional<double> box_max;
  int direction = 0;
  /// Which crossing to take (1-based); 0 takes every distinct crossing.
  int crossing = 1;
  /// Count crossings of the target modulo 2 pi.
  bool modulo_2pi = false;
  /// Keep only crossings with this oracle index (negative: any).
  int require_index = -1;
  /// Branch: nested seed evaluated at the auxiliary start parameters.
  std::shared_ptr<SeedSpec> start;
};

struct ScenarioConfig {
  std::string name;
  ScenarioKind scenario = ScenarioKind::RotateArm;
  ElasticaParams params;
  SweepSpec sweep;
  std::size_t mesh = 201;
  ContinuationSettings settings;
  std::string out = "out";
  std::vector<SeedSpec> seeds;
  std::vector<double> labels;          ///< xi values where centerlines are sampled
  std::vector<double> save_points_at;  ///< xi values whose states are saved as seed files
  bool periodicity = false;
  bool svg = true;
  /// The configuration as read, echoed into the manifest.
  std::string echo;
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);

/// A converged seed and the parameters its branch runs with.
struct Seed {
  std::string label;
  EquilibriumState state;
  ElasticaParams params;
  int index = 0;
  std::string origin;
};

std::vector<Seed> make_seeds(const ScenarioConfig& config, const SeedSpec& spec);

/// A saved branch point, readable as a File seed.
struct StoredPoint {
  ElasticaParams params;
  OrdinateKind kind = OrdinateKind::Psi;
  double xi = 0.0;
  int index = -1;
  std::vector<double> theta;
};
void save_point(const std::string& path, const StoredPoint& point);
StoredPoint load_point(const std::string& path);

struct SnapTarget {
  std::size_t branch = 0;
  std::size_t segment = 0;  ///< the target lies between points segment and segment + 1
  double xi = 0.0;          ///< on the target's branch (may differ from the fold by 2 pi k)
  double ordinate = 0.0;
  EquilibriumState state;
};

struct SnapPair {
  std::size_t branch = 0;
  std::size_t fold = 0;
  double xi = 0.0;
  std::vector<SnapTarget> targets;
  bool unresolved = false;
};

struct LabeledShape {
  std::size_t branch = 0;
  std::size_t segment = 0;
  double xi = 0.0;
  double ordinate = 0.0;
  int index = 0;
  std::vector<Point2> centerline;
};

/// Largest theta distance between each equilibrium found at xi and its
/// nearest one at xi + 2 pi on the same branch, over `samples` values of xi.
/// The branch period in tau is taken from the matching pairs; points whose
/// translate falls outside the traced part are not compared.  Infinite when
/// nothing matches.
struct PeriodicityReport {
  std::size_t branch = 0;
  int compared = 0;
  double max_defect = 0.0;
};

PeriodicityReport periodicity_check(const Branch& branch, std::size_t branch_id, int samples = 8);

struct BranchArtifact {
  ScenarioConfig config;
  std::vector<Seed> seeds;
  std::vector<Branch> branches;  ///< one per seed
  std::vector<SnapPair> snaps;
  std::vector<LabeledShape> shapes;
  std::vector<PeriodicityReport> periodicity;  ///< angle sweeps with periodicity enabled
  std::string created;  ///< ISO timestamp
  std::vector<std::string> diagnostics;
};

/// Seeds every configured equilibrium, continues each across the sweep
/// (seeds in parallel), classifies and validates folds and pairs snaps.
/// Throws SolverFailure when no seed converges.
BranchArtifact run_scenario(const ScenarioConfig& config);

/// For each fold next to an index-0 segment, the index-0 equilibria at the
/// same parameter value (modulo 2 pi for angles) on branches with the same
/// fixed parameters.
std::vector<SnapPair> snap_pairs(const BranchArtifact& artifact);

/// Newton-polished equilibria where a branch crosses `xi` (modulo 2 pi for
/// angles when `periodic`), deduplicated.
std::vector<SnapTarget> crossings_at(const BranchArtifact& artifact, std::size_t branch, double xi, bool periodic);

/// Parameters of branch b at parameter value xi.
ElasticaParams branch_params(const Branch& branch, double xi);

}  // namespace elastica
