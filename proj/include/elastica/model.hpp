#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace elastica {

/// Nondimensional parameters of the clamped elastica loaded through a rigid
/// lever arm.  The dead load is F = (-P cos(alpha), -P sin(alpha)); at
/// alpha = 0 it compresses the undeformed rod, which lies along +x.
struct ElasticaParams {
  double load = 0.0;     ///< P = |F| l^2 / K, may be negative
  double alpha = 0.0;    ///< load direction (rad)
  double epsilon = 0.0;  ///< arm length over rod length, may be negative
  double psi = 0.0;      ///< arm angle relative to the tip tangent (rad)
  double theta0 = 0.0;   ///< clamp rotation (rad)

  bool finite() const;
};

/// The parameter being continued, which also selects the ordinate of the
/// distinguished bifurcation diagram.
enum class OrdinateKind { Psi, Epsilon, Alpha, LoadP, Theta0 };

std::string_view to_string(OrdinateKind kind);
/// Accepts "psi", "epsilon", "alpha", "load" (or "P"), "theta0".
OrdinateKind parse_ordinate_kind(std::string_view name);

double parameter_value(const ElasticaParams& params, OrdinateKind kind);
void set_parameter(ElasticaParams& params, OrdinateKind kind, double value);
/// Psi, Alpha and Theta0 are angles: the model is 2*pi periodic in them.
bool is_angle(OrdinateKind kind);

/// Uniform mesh on the unit arclength interval.
class Mesh {
 public:
  explicit Mesh(std::size_t n_nodes = 201);

  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  double node(std::size_t i) const { return s_[i]; }
  const std::vector<double>& nodes() const { return s_; }
  /// Trapezoidal quadrature weight of node i (h in the interior, h/2 at the ends).
  double weight(std::size_t i) const { return (i == 0 || i + 1 == n_) ? 0.5 * h_ : h_; }

 private:
  std::size_t n_;
  double h_;
  std::vector<double> s_;
};

class MeshError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Angle field on the mesh plus the derived clamp/tip quantities.
///
/// theta_prime_0 and theta_prime_1 use the one-sided, second-order stencils
/// obtained by eliminating a ghost node with the field equation; they are the
/// boundary derivatives consistent with the discrete energy (see clamp_slope,
/// tip_slope).
struct EquilibriumState {
  Mesh mesh;
  std::vector<double> theta;
  double theta_prime_0 = 0.0;
  double theta_prime_1 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
  double energy = 0.0;

  double theta_tip() const { return theta.back(); }
};

/// Builds a state from nodal angles and fills in the derived quantities.
EquilibriumState make_state(const Mesh& mesh, std::vector<double> theta, const ElasticaParams& params);

/// Straight rod rotated by the clamp angle.
EquilibriumState straight_state(const Mesh& mesh, const ElasticaParams& params);

/// Energy density 1/2 theta'^2 + P cos(theta + alpha).
double reduced_integrand(double theta, double theta_prime, const ElasticaParams& params);

/// Discrete total energy: cell-wise bending energy, trapezoidal load
/// potential and the arm term eps P cos(theta(1) - psi + alpha).
double discrete_energy(std::span<const double> theta, const Mesh& mesh, const ElasticaParams& params);

/// r_i = -(theta_{i+1} - 2 theta_i + theta_{i-1}) / h^2 - P sin(theta_i + alpha)
/// for i = 1 .. n-2.
std::vector<double> el_residual_interior(std::span<const double> theta, const Mesh& mesh,
                                         const ElasticaParams& params);
std::vector<double> el_residual_interior(const EquilibriumState& state, const ElasticaParams& params);

/// chi = theta(1) - psi + alpha
double tip_angle(double theta1, const ElasticaParams& params);

/// theta'(1) ~ (theta_N - theta_{N-1}) / h - (h/2) P sin(theta_N + alpha).
double tip_slope(std::span<const double> theta, const Mesh& mesh, const ElasticaParams& params);
/// theta'(0) ~ (theta_1 - theta_0) / h + (h/2) P sin(theta_0 + alpha).
double clamp_slope(std::span<const double> theta, const Mesh& mesh, const ElasticaParams& params);

/// Natural boundary condition theta'(1) - eps P sin(theta(1) - psi + alpha).
double tip_condition(double theta1, double theta_prime_1, const ElasticaParams& params);
double tip_boundary_residual(const EquilibriumState& state, const ElasticaParams& params);

/// Lever arm vector eps (cos(theta1 - psi), -sin(theta1 - psi)).
Point2 arm_vector(double theta1, const ElasticaParams& params);
Point2 load_vector(const ElasticaParams& params);

/// Ordinate of the distinguished diagram for the given continuation parameter:
/// the partial derivative of the discrete total energy with respect to that
/// parameter for the free-end parameters, and theta'(0) for the clamp angle.
double ordinate(const EquilibriumState& state, const ElasticaParams& params, OrdinateKind kind);

/// Nodal positions from x' = cos(theta), y' = -sin(theta) by the trapezoidal rule.
std::vector<Point2> reconstruct_centerline(const EquilibriumState& state);

/// [r(1) x n(1)] . e_z with n(1) = F.
double tip_load_moment(const EquilibriumState& state, const ElasticaParams& params);

}  // namespace elastica
