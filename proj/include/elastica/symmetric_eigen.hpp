#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace elastica {

class EigenSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigenpairs of a symmetric tridiagonal matrix, ascending.  vectors[k] is
/// the unit eigenvector belonging to values[k].
struct TridiagonalEigen {
  std::vector<double> values;
  std::vector<std::vector<double>> vectors;
};

/// Implicit QL with Wilkinson shifts.  `off` holds the n - 1 off-diagonal
/// entries A(i, i + 1).  Throws EigenSolverError when an eigenvalue fails to
/// converge in 60 sweeps.
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> off);
TridiagonalEigen tridiagonal_eigensystem(std::span<const double> diag, std::span<const double> off);

/// Number of eigenvalues strictly below `shift`, from the inertia of the
/// LDL^T factorization of A - shift I.
std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double shift);

}  // namespace elastica
