#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "elastica/model.hpp"

namespace elastica {

/// One converged equilibrium on a continuation branch.
struct BranchPoint {
  double tau = 0.0;  ///< accumulated pseudo-arclength
  double xi = 0.0;   ///< value of the continuation parameter
  EquilibriumState state;
  /// Unit tangent over (theta nodes, xi) in the norm <u, u>_h + xi_dot^2.
  std::vector<double> tangent;
  double xi_dot = 0.0;
  double ordinate = 0.0;
  /// Morse index from the eigenvalue oracle; -1 until evaluated.
  int index = -1;
  double mu_min = std::numeric_limits<double>::quiet_NaN();
  /// Index obtained by propagating the seed index through classified folds.
  int predicted_index = -1;
  /// Sign of the determinant of the bordered Jacobian at this point.
  int det_sign = 0;
};

enum class SingularityKind { Fold, UnresolvedSingularity };

enum class Classification { Pending, Classified, Degenerate };

enum class Verdict { NotChecked, Pass, OracleOnly, Mismatch, Unresolved };

std::string to_string(SingularityKind kind);
std::string to_string(Verdict verdict);
Verdict parse_verdict(const std::string& text);

/// A fold (or an unclassifiable singularity) located between two consecutive
/// branch points.
struct FoldRecord {
  SingularityKind kind = SingularityKind::Fold;
  std::size_t prev_point = 0;  ///< index of the bracketing point before
  std::size_t next_point = 0;  ///< index of the bracketing point after
  double tau_star = 0.0;
  double xi_star = 0.0;
  int xi_ddot_sign = 0;
  int ordinate_slope_sign = 0;
  double ordinate_slope = 0.0;
  int mu_dot_sign = 0;
  int index_before = -1;  ///< predicted by the diagram rule
  int index_after = -1;
  Classification classification = Classification::Pending;

  /// Refined fold point and samples on either side of it (empty state for
  /// unresolved singularities that could not be refined).
  BranchPoint at_fold;
  BranchPoint before;
  BranchPoint after;

  // Eigenvalue oracle results.
  Verdict verdict = Verdict::NotChecked;
  double mu_at_fold = std::numeric_limits<double>::quiet_NaN();
  double mu_before = std::numeric_limits<double>::quiet_NaN();
  double mu_after = std::numeric_limits<double>::quiet_NaN();
  int oracle_index_before = -1;
  int oracle_index_after = -1;
  /// |cos| between the critical eigenmode and the theta part of the tangent.
  double mode_alignment = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

enum class BranchStatus { Completed, ClosedLoop, StepLimit, Aborted };

std::string to_string(BranchStatus status);

struct Branch {
  OrdinateKind kind = OrdinateKind::Psi;
  ElasticaParams params;  ///< fixed parameters; the active one holds the seed value
  std::vector<BranchPoint> points;
  std::vector<FoldRecord> folds;
  BranchStatus status = BranchStatus::Completed;
  std::string diagnostics;
};

}  // namespace elastica
