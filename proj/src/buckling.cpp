#include "elastica/buckling.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace elastica {

namespace {

// cot x - eps x runs from +inf to -inf across ((k-1) pi, k pi) and crosses
// zero once there, whatever the sign of eps.
double bisect_root(double epsilon, int k) {
  const double pi = std::numbers::pi;
  double lo = (k - 1) * pi;
  double hi = k * pi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = std::cos(mid) / std::sin(mid) - epsilon * mid;
    if (g == 0.0) return mid;
    (g > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

CriticalLoadTable critical_loads(double epsilon, int k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
  if (!std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be finite");
  CriticalLoadTable table{epsilon, k_max, {}};
  table.roots.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    const double x = bisect_root(epsilon, k);
    table.roots.push_back(x * x);
  }
  return table;
}

int straight_branch_index(double P, double epsilon) {
  if (!std::isfinite(P)) throw std::invalid_argument("load must be finite");
  if (P <= 0.0) return 0;
  // Roots satisfy (k-1)^2 pi^2 < P_k, so k_max = floor(sqrt P / pi) + 2 covers P.
  const int k_max = static_cast<int>(std::sqrt(P) / std::numbers::pi) + 2;
  const CriticalLoadTable table = critical_loads(epsilon, k_max);
  int count = 0;
  for (double root : table.roots) {
    if (std::abs(P - root) <= 1e-9) {
      throw AtBifurcation("load " + std::to_string(P) + " is a critical load of the straight rod");
    }
    if (root < P) ++count;
  }
  return count;
}

}  // namespace elastica
