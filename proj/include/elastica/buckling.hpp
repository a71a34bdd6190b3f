#pragma once

#include <stdexcept>
#include <vector>

namespace elastica {

/// Buckling loads of the straight rod with an arm along the tip tangent:
/// the positive roots of cot(sqrt P) = eps sqrt P, one per interval
/// ((k-1) pi, k pi) in x = sqrt P.
struct CriticalLoadTable {
  double epsilon = 0.0;
  int k_max = 0;
  std::vector<double> roots;  ///< ascending, roots[k-1] is the k-th load
};

CriticalLoadTable critical_loads(double epsilon, int k_max);

class AtBifurcation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Morse index of the straight configuration: the number of critical loads
/// strictly below P.  Throws AtBifurcation within 1e-9 of a critical load.
int straight_branch_index(double P, double epsilon);

}  // namespace elastica
