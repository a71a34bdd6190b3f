#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "elastica/branch.hpp"
#include "elastica/scenario.hpp"

namespace elastica {

inline constexpr std::array<const char*, 11> kBranchColumns = {
    "tau", "xi", "ordinate", "index", "theta0", "theta1", "theta_prime_0", "theta_prime_1", "x1", "y1", "energy"};
inline constexpr std::array<const char*, 8> kFoldColumns = {
    "tau_star", "xi_star", "xi_ddot_sign", "ordinate_slope_sign", "index_before", "index_after", "mu_min_at_fold",
    "verdict"};

/// Shortest text with 17 significant digits (round-trips every double).
std::string format_double(double value);

void write_branch_csv(std::ostream& out, const Branch& branch);
void write_folds_csv(std::ostream& out, const Branch& branch);
/// tau, xi reduced modulo 2 pi for angles, and the index predicted by the
/// diagram rule.
void write_derived_csv(std::ostream& out, const Branch& branch);

struct BranchRow {
  double tau = 0.0;
  double xi = 0.0;
  double ordinate = 0.0;
  int index = 0;
  double theta0 = 0.0;
  double theta1 = 0.0;
  double theta_prime_0 = 0.0;
  double theta_prime_1 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  double energy = 0.0;
};

/// Parses a branch CSV; throws std::runtime_error on a header or field mismatch.
std::vector<BranchRow> read_branch_csv(std::istream& in);

struct WrittenArtifact {
  std::string manifest;
  std::vector<std::string> files;
};

/// Writes CSVs, the JSON manifest, optional SVG and saved seed points into
/// `out_dir` (created if needed).
WrittenArtifact write_artifact(const BranchArtifact& artifact, const std::string& out_dir, bool svg);

struct ValidationSummary {
  int folds = 0;
  int pass = 0;
  int oracle_only = 0;
  int mismatch = 0;
  int unresolved = 0;
  std::vector<std::string> messages;
};

/// Re-runs the eigenvalue oracle on every fold stored in a manifest.
ValidationSummary validate_manifest(const std::string& manifest_path);

}  // namespace elastica
