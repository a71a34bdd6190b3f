#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "elastica/branch.hpp"
#include "elastica/bvp.hpp"
#include "elastica/model.hpp"

namespace elastica {

struct ContinuationSettings {
  OrdinateKind param_kind = OrdinateKind::Psi;
  double xi_start = 0.0;
  double xi_end = 1.0;
  /// Box the branch may explore; NaN means the sweep range itself.  The
  /// branch still starts heading towards xi_end.
  double xi_min = std::numeric_limits<double>::quiet_NaN();
  double xi_max = std::numeric_limits<double>::quiet_NaN();
  /// Initial sign of xi_dot; 0 means towards xi_end.
  int direction = 0;
  double ds_init = 0.01;
  double ds_min = 1e-5;
  double ds_max = 0.05;
  int max_steps = 20000;

  /// Corrector iteration on the bordered system (undamped).
  NewtonSettings corrector{1e-10, 12, 1.0};
  /// A step counts as easy when the corrector needs at most this many iterations.
  int easy_iterations = 4;
  /// Consecutive easy steps before ds doubles.
  int grow_after = 4;
  /// Steps whose tangent turns further than this (cosine) are retried smaller.
  double min_tangent_cos = 0.95;
  /// Target |xi_dot| at a refined fold.
  double fold_tolerance = 1e-8;

  void validate() const;
  double lower_bound() const;
  double upper_bound() const;
};

/// Tangent at a converged state: the null direction of [J, dR/dxi], oriented
/// to have positive inner product with `reference` (which is the full
/// (theta, xi) tangent of the previous point).  Returns nullopt when the
/// bordered system is singular.
struct TangentResult {
  std::vector<double> tangent;
  int det_sign = 0;
};
std::optional<TangentResult> compute_tangent(const EquilibriumState& state, double xi, const ElasticaParams& base,
                                             OrdinateKind kind, const std::vector<double>& reference);

/// First point of a branch: tangent pointing towards xi_end.
std::optional<BranchPoint> initial_point(const EquilibriumState& seed, const ElasticaParams& params,
                                         const ContinuationSettings& settings, std::string* why = nullptr);

struct StepResult {
  bool ok = false;
  BranchPoint point;
  int iterations = 0;
  std::string failure;
};

/// Euler predictor along the tangent followed by a Newton corrector on the
/// bordered system [R(theta, xi); <theta - theta_c, t>_h + (xi - xi_c) t_xi - ds].
/// `ds` may be negative.  The new point's ordinate is filled in; its index
/// is left to the caller.
StepResult predictor_corrector_step(const BranchPoint& current, double ds, const ElasticaParams& base,
                                    const ContinuationSettings& settings);

/// Looks for a sign change of xi_dot between consecutive points and refines
/// it by bisection in tau.  The returned record has no index fields.
std::optional<FoldRecord> detect_and_refine_fold(const BranchPoint& prev, const BranchPoint& next,
                                                 const ElasticaParams& base, const ContinuationSettings& settings);

/// Distinguished-diagram rule: mu_dot = -xi_ddot * d(ordinate)/dtau for the
/// free-end parameters and +xi_ddot * d(theta'(0))/dtau for the clamp angle;
/// the index drops by one when mu crosses zero upwards.
FoldRecord classify_fold(FoldRecord record, OrdinateKind kind, int index_before);

/// Fills in ordinate, oracle index and smallest eigenvalue.
void annotate_point(BranchPoint& point, const ElasticaParams& base, OrdinateKind kind);

/// Continues from a converged seed until xi leaves [lower_bound, upper_bound], the
/// branch closes, or the step budget runs out.  `seed_index` is the Morse
/// index propagated by the diagram rule; pass a negative value to take it
/// from the oracle.
Branch trace_branch(const EquilibriumState& seed, const ElasticaParams& params, const ContinuationSettings& settings,
                    int seed_index = -1);

/// <u, v>_h over theta nodes plus the product of the xi components.
double tangent_inner(const Mesh& mesh, const std::vector<double>& u, const std::vector<double>& v);

}  // namespace elastica
