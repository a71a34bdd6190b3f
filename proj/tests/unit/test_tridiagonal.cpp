#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "elastica/tridiagonal.hpp"

using namespace elastica;

namespace {

BorderedTridiagonal random_matrix(std::mt19937& rng, std::size_t n, bool bordered) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BorderedTridiagonal A(n, bordered);
  for (std::size_t i = 0; i < n; ++i) {
    A.diag[i] = u(rng);
    A.lower[i] = u(rng);
    A.upper[i] = u(rng);
    if (bordered) {
      A.column[i] = u(rng);
      A.row[i] = u(rng);
    }
  }
  A.corner = u(rng);
  return A;
}

Eigen::MatrixXd dense(const BorderedTridiagonal& A) {
  const std::size_t m = A.size();
  Eigen::MatrixXd D(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) D(i, j) = A.at(i, j);
  return D;
}

}  // namespace

TEST(Tridiagonal, MatchesDenseSolve) {
  std::mt19937 rng(3);
  for (bool bordered : {false, true}) {
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 3 + trial;
      const BorderedTridiagonal A = random_matrix(rng, n, bordered);
      Eigen::VectorXd b = Eigen::VectorXd::Random(A.size());
      const LinearSolution x = solve(A, std::span<const double>(b.data(), b.size()));
      ASSERT_EQ(x.status, LinearStatus::Ok);
      const Eigen::MatrixXd D = dense(A);
      const Eigen::VectorXd ref = D.partialPivLu().solve(b);
      for (std::size_t i = 0; i < A.size(); ++i) EXPECT_NEAR(x.x[i], ref[i], 1e-9 * (1 + std::abs(ref[i])));
      const double det = D.determinant();
      EXPECT_EQ(x.determinant_sign, det > 0 ? 1 : -1);
    }
  }
}

TEST(Tridiagonal, MultiplyMatchesDense) {
  std::mt19937 rng(8);
  const BorderedTridiagonal A = random_matrix(rng, 9, true);
  Eigen::VectorXd v = Eigen::VectorXd::Random(A.size());
  const auto y = A.multiply(std::span<const double>(v.data(), v.size()));
  const Eigen::VectorXd ref = dense(A) * v;
  for (std::size_t i = 0; i < A.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-14);
}

TEST(Tridiagonal, FlagsSingularMatrix) {
  BorderedTridiagonal A(3, false);
  A.diag = {1.0, 0.0, 1.0};
  A.lower = {0.0, 0.0, 0.0};
  A.upper = {0.0, 0.0, 0.0};
  const std::vector<double> b{1.0, 1.0, 1.0};
  const LinearSolution x = solve(A, b);
  EXPECT_EQ(x.status, LinearStatus::Singular);
  EXPECT_EQ(x.determinant_sign, 0);
}
