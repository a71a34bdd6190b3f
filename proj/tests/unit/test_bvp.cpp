#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "elastica/bvp.hpp"

using namespace elastica;

namespace {

constexpr double kPi = std::numbers::pi;

struct RandomCase {
  ElasticaParams params;
  std::vector<double> theta;
};

RandomCase random_case(std::mt19937& rng, const Mesh& mesh) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RandomCase c;
  c.params = {15.0 * u(rng), 3.0 * u(rng), 0.6 * u(rng), 3.0 * u(rng), u(rng)};
  c.theta.resize(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) c.theta[i] = c.params.theta0 + 2.0 * u(rng) * mesh.node(i);
  return c;
}

EquilibriumState buckled(const ElasticaParams& p, std::size_t n, double bump) {
  const Mesh mesh(n);
  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = p.theta0 + bump * std::sin(0.5 * kPi * mesh.node(i));
  auto [s, report] = newton_solve(make_state(mesh, std::move(theta), p), p);
  EXPECT_TRUE(report.converged);
  return s;
}

}  // namespace

TEST(Jacobian, MatchesFiniteDifferencesOnRandomStates) {
  std::mt19937 rng(2024);
  const Mesh mesh(41);
  for (int trial = 0; trial < 20; ++trial) {
    const RandomCase c = random_case(rng, mesh);
    const LinearizedSystem sys = assemble_system(c.theta, mesh, c.params);
    double worst = 0.0;
    for (std::size_t j = 0; j < mesh.size(); ++j) {
      std::vector<double> hi = c.theta, lo = c.theta;
      const double d = 1e-6;
      hi[j] += d;
      lo[j] -= d;
      const auto rh = assemble_residual(hi, mesh, c.params);
      const auto rl = assemble_residual(lo, mesh, c.params);
      for (std::size_t i = 0; i < mesh.size(); ++i) {
        const double fd = (rh[i] - rl[i]) / (2 * d);
        worst = std::max(worst, std::abs(fd - sys.jacobian.at(i, j)) / std::max(1.0, std::abs(fd)));
      }
    }
    EXPECT_LT(worst, 1e-6) << "trial " << trial;
  }
}

TEST(Jacobian, FreeBlockIsSymmetric) {
  std::mt19937 rng(5);
  const Mesh mesh(21);
  const RandomCase c = random_case(rng, mesh);
  const LinearizedSystem sys = assemble_system(c.theta, mesh, c.params);
  for (std::size_t i = 1; i + 1 < mesh.size(); ++i) {
    EXPECT_NEAR(sys.jacobian.at(i, i + 1), sys.jacobian.at(i + 1, i), 1e-12);
  }
}

TEST(Residual, IsEnergyGradient) {
  std::mt19937 rng(99);
  const Mesh mesh(51);
  for (int trial = 0; trial < 10; ++trial) {
    const RandomCase c = random_case(rng, mesh);
    const auto r = assemble_residual(c.theta, mesh, c.params);
    for (std::size_t i = 1; i < mesh.size(); ++i) {
      // Five-point stencil keeps truncation well below the tolerance.
      auto e = [&](double d) {
        std::vector<double> t = c.theta;
        t[i] += d;
        return discrete_energy(t, mesh, c.params);
      };
      const double d = 1e-3;
      const double fd = (8 * (e(d) - e(-d)) - (e(2 * d) - e(-2 * d))) / (12 * d);
      EXPECT_NEAR(r[i], fd, 1e-8) << "node " << i;
    }
  }
}

TEST(Residual, ParameterDerivativeMatchesFiniteDifferences) {
  std::mt19937 rng(11);
  const Mesh mesh(31);
  for (int trial = 0; trial < 5; ++trial) {
    const RandomCase c = random_case(rng, mesh);
    for (OrdinateKind k : {OrdinateKind::Psi, OrdinateKind::Epsilon, OrdinateKind::Alpha, OrdinateKind::LoadP,
                           OrdinateKind::Theta0}) {
      const auto an = parameter_derivative(c.theta, mesh, c.params, k);
      ElasticaParams hi = c.params, lo = c.params;
      const double d = 1e-6;
      set_parameter(hi, k, parameter_value(c.params, k) + d);
      set_parameter(lo, k, parameter_value(c.params, k) - d);
      const auto rh = assemble_residual(c.theta, mesh, hi);
      const auto rl = assemble_residual(c.theta, mesh, lo);
      for (std::size_t i = 0; i < mesh.size(); ++i) {
        EXPECT_NEAR(an[i], (rh[i] - rl[i]) / (2 * d), 1e-6 * std::max(1.0, std::abs(an[i]))) << to_string(k);
      }
    }
  }
}

TEST(Newton, ConvergesQuadratically) {
  const ElasticaParams p{9 * kPi * kPi / 4, 0.2, 0.25, 0.5, 0.0};
  const Mesh mesh(101);
  std::vector<double> theta(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) theta[i] = 0.9 * std::sin(0.5 * kPi * mesh.node(i));
  auto [s, report] = newton_solve(make_state(mesh, theta, p), p);
  ASSERT_TRUE(report.converged);
  EXPECT_LT(report.final_residual, 1e-10);
  const auto& h = report.residual_history;
  ASSERT_GE(h.size(), 3u);
  // The last productive iteration should square the error up to a constant.
  const std::size_t k = h.size() - 2;
  if (h[k] > 1e-13 && h[k - 1] < 1e-2) EXPECT_LT(h[k + 1], 100 * h[k] * h[k] / h[k - 1] + 1e-12);
}

TEST(Newton, ReportsBadSettings) {
  NewtonSettings s;
  s.tol_residual = -1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Convergence, SolutionIsSecondOrder) {
  // Richardson ratios of a smooth functional over 101 / 201 / 401 nodes.
  const ElasticaParams p{9.0, 0.3, 0.4, 0.9, 0.0};
  const double q1 = buckled(p, 101, 0.7).theta_prime_0;
  const double q2 = buckled(p, 201, 0.7).theta_prime_0;
  const double q3 = buckled(p, 401, 0.7).theta_prime_0;
  const double ratio = (q1 - q2) / (q2 - q3);
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
}
