#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "elastica/branch.hpp"
#include "elastica/model.hpp"

namespace elastica {

/// Discretized second variation -h'' - P cos(theta + alpha) h on the free
/// nodes 1..N, with h(0) = 0 eliminated and the tip condition
/// h'(1) + b h(1) = 0, b = -eps P cos(chi), folded in through a ghost node.
///
/// Stored in the symmetric form M^{-1/2} H M^{-1/2}, where H is the Hessian
/// of discrete_energy and M = diag(h, ..., h, h/2) the trapezoidal mass.
struct SecondVariationOperator {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;
  double bc_tip_coeff = 0.0;
  Mesh mesh;

  std::size_t size() const { return diagonal.size(); }
  /// Applies the operator to nodal values h_1..h_N.
  std::vector<double> apply(std::span<const double> nodal) const;
  /// <u, v>_h on the free nodes with trapezoidal weights.
  double inner(std::span<const double> u, std::span<const double> v) const;
};

SecondVariationOperator assemble_operator(const EquilibriumState& state, const ElasticaParams& params);

struct SpectrumReport {
  std::vector<double> eigenvalues;  ///< ascending
  int index = 0;
  double mu_min = 0.0;
  double tol_eig = 0.0;
};

/// Relative threshold under which an eigenvalue counts as zero.
inline constexpr double kRelativeEigenTolerance = 1e-8;

SpectrumReport compute_spectrum(const SecondVariationOperator& op);
SpectrumReport spectrum_at(const EquilibriumState& state, const ElasticaParams& params);

/// Eigenpair with the smallest |mu|; `mode` holds nodal values h_1..h_N.
struct CriticalMode {
  double mu = 0.0;
  std::size_t ordinal = 0;  ///< position in the ascending spectrum
  std::vector<double> mode;
};
CriticalMode critical_mode(const SecondVariationOperator& op);

/// Checks a refined fold against the eigenvalue oracle: the critical
/// eigenvalue is near zero at the fold, changes sign across it, and the
/// oracle's index jump matches the diagram rule.  Fills the oracle fields of
/// the record and sets its verdict.
FoldRecord validate_fold(const Branch& branch, FoldRecord record);

class FoldClassificationMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws FoldClassificationMismatch naming the first fold whose verdict is
/// Mismatch.
void enforce_fold_law(const Branch& branch);

}  // namespace elastica
