#pragma once

#include <span>
#include <utility>
#include <vector>

#include "elastica/model.hpp"
#include "elastica/tridiagonal.hpp"

namespace elastica {

struct NewtonSettings {
  double tol_residual = 1e-10;
  int max_iters = 30;
  double damping_min = 1.0 / 64.0;

  void validate() const;
};

enum class SolveStatus { Converged, NonConvergence, SingularJacobian };

struct SolveReport {
  SolveStatus status = SolveStatus::NonConvergence;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  /// Residual max-norm before each iteration and after the last one.
  std::vector<double> residual_history;
};

/// Residual and Jacobian of the discretized boundary-value problem.
///
/// Rows: the Dirichlet row theta_0 - theta0, then h * r_i for each interior
/// node (r_i from el_residual_interior), then the tip row
/// tip_slope - eps P sin(chi).  Interior and tip rows together are the
/// gradient of discrete_energy with respect to the free nodes, so the
/// Jacobian restricted to them is the symmetric energy Hessian.
struct LinearizedSystem {
  std::vector<double> residual;
  BorderedTridiagonal jacobian;
};

std::vector<double> assemble_residual(std::span<const double> theta, const Mesh& mesh,
                                      const ElasticaParams& params);
LinearizedSystem assemble_system(std::span<const double> theta, const Mesh& mesh, const ElasticaParams& params);

/// Derivative of assemble_residual with respect to one parameter.
std::vector<double> parameter_derivative(std::span<const double> theta, const Mesh& mesh,
                                         const ElasticaParams& params, OrdinateKind kind);

double max_norm(std::span<const double> v);

/// Damped Newton iteration with a backtracking line search on the residual
/// max-norm.
std::pair<EquilibriumState, SolveReport> newton_solve(const EquilibriumState& initial_guess,
                                                      const ElasticaParams& params,
                                                      const NewtonSettings& settings = {});

}  // namespace elastica
