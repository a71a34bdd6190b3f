#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace elastica {

/// Square matrix made of an n x n tridiagonal block, optionally bordered by
/// one dense column and one dense row:
///
///     [ T   c ]
///     [ r^T d ]
///
/// The unbordered form is the Newton Jacobian of the boundary-value problem;
/// the bordered form is the pseudo-arclength system.
class BorderedTridiagonal {
 public:
  BorderedTridiagonal(std::size_t n, bool bordered);

  std::size_t block_size() const { return n_; }
  std::size_t size() const { return bordered_ ? n_ + 1 : n_; }
  bool bordered() const { return bordered_; }

  /// T(i, i - 1), T(i, i) and T(i, i + 1).
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
  /// Border column c (first n entries of the last column).
  std::vector<double> column;
  /// Border row r (first n entries of the last row).
  std::vector<double> row;
  double corner = 0.0;

  /// Dense matrix-vector product, used for residual checks.
  std::vector<double> multiply(std::span<const double> x) const;
  /// Entry (i, j) of the full matrix.
  double at(std::size_t i, std::size_t j) const;

 private:
  std::size_t n_;
  bool bordered_;
};

enum class LinearStatus { Ok, Singular };

struct LinearSolution {
  LinearStatus status = LinearStatus::Ok;
  std::vector<double> x;
  /// Sign of the determinant, 0 when singular.
  int determinant_sign = 0;
  /// Smallest |pivot| / row scale met during elimination.
  double min_relative_pivot = 0.0;
};

/// Gaussian elimination with partial pivoting. A pivot below
/// pivot_tolerance times the scale of its row is reported as Singular.
LinearSolution solve(const BorderedTridiagonal& matrix, std::span<const double> rhs,
                     double pivot_tolerance = 1e-14);

}  // namespace elastica
