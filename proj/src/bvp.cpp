#include "elastica/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace elastica {

void NewtonSettings::validate() const {
  if (!(tol_residual > 0.0)) throw std::invalid_argument("tol_residual must be positive");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  if (!(damping_min > 0.0 && damping_min <= 1.0)) throw std::invalid_argument("damping_min must lie in (0, 1]");
}

double max_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    if (std::isnan(x)) return x;
    m = std::max(m, std::abs(x));
  }
  return m;
}

std::vector<double> assemble_residual(std::span<const double> theta, const Mesh& mesh,
                                      const ElasticaParams& params) {
  const std::size_t n = theta.size();
  const double h = mesh.spacing();
  const double P = params.load;
  std::vector<double> r(n);
  r[0] = theta[0] - params.theta0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double jump = (theta[i + 1] - theta[i]) - (theta[i] - theta[i - 1]);
    r[i] = -jump / h - h * P * std::sin(theta[i] + params.alpha);
  }
  r[n - 1] = tip_condition(theta[n - 1], tip_slope(theta, mesh, params), params);
  return r;
}

LinearizedSystem assemble_system(std::span<const double> theta, const Mesh& mesh, const ElasticaParams& params) {
  if (theta.size() != mesh.size()) throw MeshError("angle field size does not match the mesh");
  const std::size_t n = theta.size();
  const double h = mesh.spacing();
  const double P = params.load;
  LinearizedSystem sys{assemble_residual(theta, mesh, params), BorderedTridiagonal(n, false)};
  auto& J = sys.jacobian;
  J.diag[0] = 1.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    J.lower[i] = -1.0 / h;
    J.diag[i] = 2.0 / h - h * P * std::cos(theta[i] + params.alpha);
    J.upper[i] = -1.0 / h;
  }
  const double chi = tip_angle(theta[n - 1], params);
  J.lower[n - 1] = -1.0 / h;
  J.diag[n - 1] = 1.0 / h - 0.5 * h * P * std::cos(theta[n - 1] + params.alpha) -
                  params.epsilon * P * std::cos(chi);
  return sys;
}

std::vector<double> parameter_derivative(std::span<const double> theta, const Mesh& mesh,
                                         const ElasticaParams& params, OrdinateKind kind) {
  const std::size_t n = theta.size();
  const double h = mesh.spacing();
  const double P = params.load;
  const double eps = params.epsilon;
  const double chi = tip_angle(theta[n - 1], params);
  std::vector<double> d(n, 0.0);
  switch (kind) {
    case OrdinateKind::Theta0:
      d[0] = -1.0;
      break;
    case OrdinateKind::Psi:
      d[n - 1] = eps * P * std::cos(chi);
      break;
    case OrdinateKind::Epsilon:
      d[n - 1] = -P * std::sin(chi);
      break;
    case OrdinateKind::Alpha:
      for (std::size_t i = 1; i + 1 < n; ++i) d[i] = -h * P * std::cos(theta[i] + params.alpha);
      d[n - 1] = -0.5 * h * P * std::cos(theta[n - 1] + params.alpha) - eps * P * std::cos(chi);
      break;
    case OrdinateKind::LoadP:
      for (std::size_t i = 1; i + 1 < n; ++i) d[i] = -h * std::sin(theta[i] + params.alpha);
      d[n - 1] = -0.5 * h * std::sin(theta[n - 1] + params.alpha) - eps * std::sin(chi);
      break;
  }
  return d;
}

std::pair<EquilibriumState, SolveReport> newton_solve(const EquilibriumState& initial_guess,
                                                      const ElasticaParams& params,
                                                      const NewtonSettings& settings) {
  settings.validate();
  const Mesh& mesh = initial_guess.mesh;
  std::vector<double> theta = initial_guess.theta;
  SolveReport report;

  const bool finite_guess =
      params.finite() && std::all_of(theta.begin(), theta.end(), [](double t) { return std::isfinite(t); });
  if (!finite_guess) {
    report.final_residual = std::numeric_limits<double>::quiet_NaN();
    return {initial_guess, report};
  }

  std::vector<double> residual = assemble_residual(theta, mesh, params);
  double norm = max_norm(residual);
  report.residual_history.push_back(norm);

  // Once below tolerance, keep iterating while Newton still gains an order of
  // magnitude, so converged states sit at round-off level.
  int polish = 0;
  while (report.iterations < settings.max_iters) {
    if (norm <= settings.tol_residual) {
      report.status = SolveStatus::Converged;
      report.converged = true;
      if (polish >= 2 || norm == 0.0) break;
    }
    const LinearizedSystem sys = assemble_system(theta, mesh, params);
    std::vector<double> rhs(sys.residual);
    for (double& v : rhs) v = -v;
    const LinearSolution step = solve(sys.jacobian, rhs);
    if (step.status == LinearStatus::Singular) {
      if (!report.converged) report.status = SolveStatus::SingularJacobian;
      break;
    }

    double lambda = 1.0;
    std::vector<double> trial(theta.size());
    std::vector<double> trial_residual;
    double trial_norm = 0.0;
    for (;;) {
      for (std::size_t i = 0; i < theta.size(); ++i) trial[i] = theta[i] + lambda * step.x[i];
      trial_residual = assemble_residual(trial, mesh, params);
      trial_norm = max_norm(trial_residual);
      if (trial_norm < norm || lambda <= settings.damping_min) break;
      lambda = std::max(0.5 * lambda, settings.damping_min);
    }

    if (report.converged) {
      if (!(trial_norm < 0.1 * norm)) break;
      ++polish;
    }
    ++report.iterations;
    theta.swap(trial);
    residual.swap(trial_residual);
    norm = trial_norm;
    report.residual_history.push_back(norm);
    if (std::isnan(norm)) break;
  }
  if (!report.converged && norm <= settings.tol_residual) {
    report.status = SolveStatus::Converged;
    report.converged = true;
  }
  report.final_residual = norm;
  return {make_state(mesh, std::move(theta), params), report};
}

}  // namespace elastica
