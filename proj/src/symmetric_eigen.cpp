#include "elastica/symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace elastica {

namespace {

// Implicit QL on (d, e); e[i] couples rows i and i + 1, e[n-1] is scratch.
// When z is non-empty it holds an n x n row-major matrix whose columns are
// rotated along with the iteration.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, std::vector<double>& z) {
  const std::size_t n = d.size();
  const bool vectors = !z.empty();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_sweeps = 60;

  for (std::size_t l = 0; l < n; ++l) {
    int sweeps = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m == l) break;
      if (++sweeps > max_sweeps) {
        throw EigenSolverError("tridiagonal QL did not converge for eigenvalue " + std::to_string(l) +
                               " (|e| = " + std::to_string(std::abs(e[l])) + ")");
      }
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0;
      double c = 1.0;
      double p = 0.0;
      bool underflow = false;
      for (std::size_t i = m; i-- > l;) {
        double f = s * e[i];
        const double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        if (vectors) {
          for (std::size_t k = 0; k < n; ++k) {
            f = z[k * n + i + 1];
            z[k * n + i + 1] = s * z[k * n + i] + c * f;
            z[k * n + i] = c * z[k * n + i] - s * f;
          }
        }
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    } while (m != l);
  }
}

void check_shape(std::span<const double> diag, std::span<const double> off) {
  if (diag.empty()) throw std::invalid_argument("empty matrix");
  if (off.size() + 1 != diag.size()) throw std::invalid_argument("off-diagonal must have n - 1 entries");
}

}  // namespace

std::vector<double> tridiagonal_eigenvalues(std::span<const double> diag, std::span<const double> off) {
  check_shape(diag, off);
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(off.begin(), off.end());
  e.push_back(0.0);
  std::vector<double> none;
  ql_implicit(d, e, none);
  std::sort(d.begin(), d.end());
  return d;
}

TridiagonalEigen tridiagonal_eigensystem(std::span<const double> diag, std::span<const double> off) {
  check_shape(diag, off);
  const std::size_t n = diag.size();
  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(off.begin(), off.end());
  e.push_back(0.0);
  std::vector<double> z(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) z[i * n + i] = 1.0;
  ql_implicit(d, e, z);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  TridiagonalEigen out;
  out.values.reserve(n);
  out.vectors.reserve(n);
  for (std::size_t k : order) {
    out.values.push_back(d[k]);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i * n + k];
    out.vectors.push_back(std::move(v));
  }
  return out;
}

std::size_t sturm_count(std::span<const double> diag, std::span<const double> off, double shift) {
  check_shape(diag, off);
  constexpr double tiny = 1e-300;
  std::size_t negatives = 0;
  double q = diag[0] - shift;
  for (std::size_t i = 0;; ++i) {
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++negatives;
    if (i + 1 == diag.size()) break;
    q = (diag[i + 1] - shift) - off[i] * off[i] / q;
  }
  return negatives;
}

}  // namespace elastica
