#include "elastica/model.hpp"

#include <cmath>
#include <string>

namespace elastica {

bool ElasticaParams::finite() const {
  return std::isfinite(load) && std::isfinite(alpha) && std::isfinite(epsilon) && std::isfinite(psi) &&
         std::isfinite(theta0);
}

std::string_view to_string(OrdinateKind kind) {
  switch (kind) {
    case OrdinateKind::Psi: return "psi";
    case OrdinateKind::Epsilon: return "epsilon";
    case OrdinateKind::Alpha: return "alpha";
    case OrdinateKind::LoadP: return "load";
    case OrdinateKind::Theta0: return "theta0";
  }
  throw std::invalid_argument("unknown ordinate kind");
}

OrdinateKind parse_ordinate_kind(std::string_view name) {
  if (name == "psi") return OrdinateKind::Psi;
  if (name == "epsilon") return OrdinateKind::Epsilon;
  if (name == "alpha") return OrdinateKind::Alpha;
  if (name == "load" || name == "P") return OrdinateKind::LoadP;
  if (name == "theta0") return OrdinateKind::Theta0;
  throw std::invalid_argument("unknown parameter name '" + std::string(name) + "'");
}

double parameter_value(const ElasticaParams& params, OrdinateKind kind) {
  switch (kind) {
    case OrdinateKind::Psi: return params.psi;
    case OrdinateKind::Epsilon: return params.epsilon;
    case OrdinateKind::Alpha: return params.alpha;
    case OrdinateKind::LoadP: return params.load;
    case OrdinateKind::Theta0: return params.theta0;
  }
  throw std::invalid_argument("unknown ordinate kind");
}

void set_parameter(ElasticaParams& params, OrdinateKind kind, double value) {
  switch (kind) {
    case OrdinateKind::Psi: params.psi = value; return;
    case OrdinateKind::Epsilon: params.epsilon = value; return;
    case OrdinateKind::Alpha: params.alpha = value; return;
    case OrdinateKind::LoadP: params.load = value; return;
    case OrdinateKind::Theta0: params.theta0 = value; return;
  }
  throw std::invalid_argument("unknown ordinate kind");
}

bool is_angle(OrdinateKind kind) {
  return kind == OrdinateKind::Psi || kind == OrdinateKind::Alpha || kind == OrdinateKind::Theta0;
}

Mesh::Mesh(std::size_t n_nodes) : n_(n_nodes), h_(0.0) {
  if (n_nodes < 3) throw MeshError("mesh needs at least 3 nodes, got " + std::to_string(n_nodes));
  h_ = 1.0 / static_cast<double>(n_ - 1);
  s_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) s_[i] = static_cast<double>(i) * h_;
  s_.back() = 1.0;
}

double reduced_integrand(double theta, double theta_prime, const ElasticaParams& params) {
  return 0.5 * theta_prime * theta_prime + params.load * std::cos(theta + params.alpha);
}

double tip_angle(double theta1, const ElasticaParams& params) { return theta1 - params.psi + params.alpha; }

double discrete_energy(std::span<const double> theta, const Mesh& mesh, const ElasticaParams& params) {
  const double h = mesh.spacing();
  double bending = 0.0;
  double potential = 0.0;
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    const double d = theta[i + 1] - theta[i];
    bending += d * d;
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    potential += mesh.weight(i) * std::cos(theta[i] + params.alpha);
  }
  const double arm = params.epsilon * params.load * std::cos(tip_angle(theta.back(), params));
  return 0.5 * bending / h + params.load * potential + arm;
}

std::vector<double> el_residual_interior(std::span<const double> theta, const Mesh& mesh,
                                         const ElasticaParams& params) {
  if (theta.size() < 3 || theta.size() != mesh.size()) {
    throw MeshError("angle field does not match a mesh of at least 3 nodes");
  }
  const double inv_h2 = 1.0 / (mesh.spacing() * mesh.spacing());
  std::vector<double> r(theta.size() - 2);
  for (std::size_t i = 1; i + 1 < theta.size(); ++i) {
    const double curvature_jump = (theta[i + 1] - theta[i]) - (theta[i] - theta[i - 1]);
    r[i - 1] = -curvature_jump * inv_h2 - params.load * std::sin(theta[i] + params.alpha);
  }
  return r;
}

std::vector<double> el_residual_interior(const EquilibriumState& state, const ElasticaParams& params) {
  return el_residual_interior(state.theta, state.mesh, params);
}

double tip_slope(std::span<const double> theta, const Mesh& mesh, const ElasticaParams& params) {
  const std::size_t n = theta.size();
  const double h = mesh.spacing();
  return (theta[n - 1] - theta[n - 2]) / h - 0.5 * h * params.load * std::sin(theta[n - 1] + params.alpha);
}

double clamp_slope(std::span<const double> theta, const Mesh& mesh, const ElasticaParams& params) {
  const double h = mesh.spacing();
  return (theta[1] - theta[0]) / h + 0.5 * h * params.load * std::sin(theta[0] + params.alpha);
}

double tip_condition(double theta1, double theta_prime_1, const ElasticaParams& params) {
  return theta_prime_1 - params.epsilon * params.load * std::sin(tip_angle(theta1, params));
}

double tip_boundary_residual(const EquilibriumState& state, const ElasticaParams& params) {
  return tip_condition(state.theta_tip(), state.theta_prime_1, params);
}

Point2 arm_vector(double theta1, const ElasticaParams& params) {
  const double angle = theta1 - params.psi;
  return {params.epsilon * std::cos(angle), -params.epsilon * std::sin(angle)};
}

Point2 load_vector(const ElasticaParams& params) {
  return {-params.load * std::cos(params.alpha), -params.load * std::sin(params.alpha)};
}

EquilibriumState make_state(const Mesh& mesh, std::vector<double> theta, const ElasticaParams& params) {
  if (theta.size() != mesh.size()) throw MeshError("angle field size does not match the mesh");
  EquilibriumState state{mesh, std::move(theta)};
  const auto& t = state.theta;
  state.theta_prime_0 = clamp_slope(t, mesh, params);
  state.theta_prime_1 = tip_slope(t, mesh, params);
  const Point2 tip = reconstruct_centerline(state).back();
  state.x1 = tip.x;
  state.y1 = tip.y;
  state.energy = discrete_energy(t, mesh, params);
  return state;
}

EquilibriumState straight_state(const Mesh& mesh, const ElasticaParams& params) {
  return make_state(mesh, std::vector<double>(mesh.size(), params.theta0), params);
}

double ordinate(const EquilibriumState& state, const ElasticaParams& params, OrdinateKind kind) {
  const double chi = tip_angle(state.theta_tip(), params);
  const Point2 arm = arm_vector(state.theta_tip(), params);
  const double px = state.x1 + arm.x;
  const double py = state.y1 + arm.y;
  const double ca = std::cos(params.alpha);
  const double sa = std::sin(params.alpha);
  switch (kind) {
    case OrdinateKind::Psi: return state.theta_prime_1;
    case OrdinateKind::Epsilon: return params.load * std::cos(chi);
    case OrdinateKind::Alpha: return -params.load * sa * px + params.load * ca * py;
    case OrdinateKind::LoadP: return ca * px + sa * py;
    case OrdinateKind::Theta0: return state.theta_prime_0;
  }
  throw std::invalid_argument("unknown ordinate kind");
}

std::vector<Point2> reconstruct_centerline(const EquilibriumState& state) {
  const auto& t = state.theta;
  const double h = state.mesh.spacing();
  std::vector<Point2> r(t.size());
  for (std::size_t i = 1; i < t.size(); ++i) {
    r[i].x = r[i - 1].x + 0.5 * h * (std::cos(t[i - 1]) + std::cos(t[i]));
    r[i].y = r[i - 1].y - 0.5 * h * (std::sin(t[i - 1]) + std::sin(t[i]));
  }
  return r;
}

double tip_load_moment(const EquilibriumState& state, const ElasticaParams& params) {
  const Point2 f = load_vector(params);
  return state.x1 * f.y - state.y1 * f.x;
}

}  // namespace elastica
