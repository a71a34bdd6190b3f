// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "elastica/buckling.hpp"
#include "elastica/bvp.hpp"
#include "elastica/scenario.hpp"
#include "elastica/stability.hpp"

using namespace elastica;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

int failures = 0;

void report(int n, bool ok, const std::string& what) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const std::string& what) { std::printf("  note: %s\n", what.c_str()); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

BranchArtifact run(const std::string& name) {
  return run_scenario(load_config(std::string(ELASTICA_CONFIG_DIR) + "/" + name + ".json"));
}

// Criterion 1: brackets and the zero-arm closed form.
void buckling_brackets() {
  bool ok = true;
  double worst_exact = 0.0;
  for (double eps : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
    const CriticalLoadTable t = critical_loads(eps, 5);
    for (int k = 1; k <= 5; ++k) {
      const double x = std::sqrt(t.roots[k - 1]);
      const double mid = (k - 0.5) * kPi;
      if (eps > 0.0) ok = ok && x > (k - 1) * kPi && x < mid;
      if (eps < 0.0) ok = ok && x > mid && x < k * kPi;
      // Independent check: the characteristic function changes sign around x.
      auto g = [eps](double y) { return std::cos(y) - eps * y * std::sin(y); };
      if (eps != 0.0) ok = ok && g(x - 1e-8) * g(x + 1e-8) < 0.0;
      if (eps == 0.0) worst_exact = std::max(worst_exact, std::abs(t.roots[k - 1] - std::pow((2 * k - 1) * kPi / 2, 2)));
    }
  }
  ok = ok && worst_exact < 1e-10;
  report(1, ok, fmt("roots bracketed for 5 arm ratios x 5 modes; zero-arm error %.2e", worst_exact));
}

int oracle_index(double P, double eps, std::size_t nodes) {
  const ElasticaParams p{P, 0.0, eps, 0.0, 0.0};
  return spectrum_at(straight_state(Mesh(nodes), p), p).index;
}

// Criterion 2: the four seeding cases.
void index_seeding() {
  const double p1 = kPi * kPi / 4, p3 = 9 * kPi * kPi / 4;
  struct Case {
    double P, eps;
    int expected;
  } cases[] = {{p1, 0.25, 1}, {p3, 0.25, 2}, {p1, -0.25, 0}, {p3, -0.25, 1}};
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    const int analytic = straight_branch_index(c.P, c.eps);
    const int oracle = oracle_index(c.P, c.eps, 201);
    ok = ok && analytic == c.expected && oracle == c.expected;
    detail += " " + std::to_string(analytic) + "/" + std::to_string(oracle);
  }
  report(2, ok, "analytic/oracle indices:" + detail + " (expected 1 2 0 1)");
}

// Criterion 3: random straight states.
void random_indices() {
  std::mt19937 rng(20240601);
  std::uniform_real_distribution<double> load(0.0, 30.0), arm(-0.6, 0.6);
  int agree = 0, total = 0;
  for (int i = 0; i < 50; ++i) {
    double P = load(rng);
    if (P == 0.0) P = 30.0;
    const double eps = arm(rng);
    ++total;
    try {
      agree += straight_branch_index(P, eps) == oracle_index(P, eps, 201);
    } catch (const AtBifurcation&) {
    }
  }
  report(3, agree == total, std::to_string(agree) + "/" + std::to_string(total) + " random (P, eps) agree");
}

struct FoldTally {
  int folds = 0;
  int ok = 0;
  int unresolved = 0;
};

void tally(const BranchArtifact& a, FoldTally& t) {
  for (const Branch& b : a.branches) {
    for (const FoldRecord& f : b.folds) {
      if (f.kind != SingularityKind::Fold) {
        ++t.unresolved;
        continue;
      }
      ++t.folds;
      const double tol = f.at_fold.state.theta.empty() ? 0.0 : spectrum_at(f.at_fold.state, branch_params(b, f.xi_star)).tol_eig;
      const bool near_zero = std::abs(f.mu_at_fold) < 100.0 * tol;
      const bool flips = f.mu_before * f.mu_after < 0.0;
      const bool jump = f.classification == Classification::Classified &&
                        f.index_after - f.index_before == f.oracle_index_after - f.oracle_index_before;
      t.ok += near_zero && flips && jump && f.verdict == Verdict::Pass;
    }
  }
}

double max_defect(const BranchArtifact& a) {
  double d = 0.0;
  for (const PeriodicityReport& r : a.periodicity) d = std::max(d, r.compared > 0 ? r.max_defect : INFINITY);
  return a.periodicity.empty() ? INFINITY : d;
}

// Distinct equilibria at one parameter value across all branches.
std::size_t coexisting(const BranchArtifact& a, double xi) {
  std::vector<EquilibriumState> found;
  for (std::size_t b = 0; b < a.branches.size(); ++b) {
    for (SnapTarget& t : crossings_at(a, b, xi, true)) {
      const bool dup = std::any_of(found.begin(), found.end(), [&](const EquilibriumState& s) {
        double d = 0.0;
        for (std::size_t i = 0; i < s.theta.size(); ++i) d = std::max(d, std::abs(s.theta[i] - t.state.theta[i]));
        return d < 1e-6;
      });
      if (!dup) found.push_back(std::move(t.state));
    }
  }
  return found.size();
}

std::pair<std::size_t, double> most_coexisting(const BranchArtifact& a) {
  std::size_t best = 0;
  double at = 0.0;
  for (int j = 0; j < 72; ++j) {
    const double xi = kTwoPi * (j + 0.5) / 72;
    const std::size_t n = coexisting(a, xi);
    if (n > best) best = n, at = xi;
  }
  return {best, at};
}

void hygiene() {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Mesh mesh(41);
  double jac = 0.0, grad = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ElasticaParams p{15 * u(rng), 3 * u(rng), 0.6 * u(rng), 3 * u(rng), u(rng)};
    std::vector<double> theta(mesh.size());
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = p.theta0 + 2 * u(rng) * mesh.node(i);
    const LinearizedSystem sys = assemble_system(theta, mesh, p);
    const std::vector<double> r = assemble_residual(theta, mesh, p);
    for (std::size_t j = 0; j < theta.size(); ++j) {
      auto shifted = [&](double d) {
        std::vector<double> t = theta;
        t[j] += d;
        return t;
      };
      const double d = 1e-6;
      const auto rh = assemble_residual(shifted(d), mesh, p);
      const auto rl = assemble_residual(shifted(-d), mesh, p);
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double fd = (rh[i] - rl[i]) / (2 * d);
        jac = std::max(jac, std::abs(fd - sys.jacobian.at(i, j)) / std::max(1.0, std::abs(fd)));
      }
      if (j == 0) continue;
      auto e = [&](double s) { return discrete_energy(shifted(s), mesh, p); };
      const double h = 1e-3;
      const double fd = (8 * (e(h) - e(-h)) - (e(2 * h) - e(-2 * h))) / (12 * h);
      grad = std::max(grad, std::abs(fd - r[j]));
    }
  }

  // Second-order convergence of a spectrum and a solution functional.
  const ElasticaParams straight{3.0, 0.0, 0.25, 0.0, 0.0};
  const ElasticaParams bent{9.0, 0.3, 0.4, 0.9, 0.0};
  double mu[3], q[3];
  const std::size_t nodes[3] = {101, 201, 401};
  bool converged = true;
  for (int m = 0; m < 3; ++m) {
    mu[m] = spectrum_at(straight_state(Mesh(nodes[m]), straight), straight).eigenvalues[0];
    const Mesh mm(nodes[m]);
    std::vector<double> theta(nodes[m]);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = 0.7 * std::sin(0.5 * kPi * mm.node(i));
    auto [s, rep] = newton_solve(make_state(mm, std::move(theta), bent), bent);
    converged = converged && rep.converged;
    q[m] = s.theta_prime_0;
  }
  const double r_mu = (mu[0] - mu[1]) / (mu[1] - mu[2]);
  const double r_q = (q[0] - q[1]) / (q[1] - q[2]);
  const bool ok = jac < 1e-6 && grad < 1e-8 && converged && r_mu >= 3 && r_mu <= 5 && r_q >= 3 && r_q <= 5;
  report(7, ok,
         fmt("jacobian fd %.1e, energy gradient %.1e, ", jac, grad) +
             fmt("h^2 ratios spectrum %.3f solution %.3f", r_mu, r_q));
}

}  // namespace

int main() {
  buckling_brackets();
  index_seeding();
  random_indices();

  const BranchArtifact arm1 = run("rotate_arm_a1_e25");
  const BranchArtifact arm9 = run("rotate_arm_a9_e25");
  const BranchArtifact arm1h = run("rotate_arm_a1_e50");
  const BranchArtifact arm9h = run("rotate_arm_a9_e50");
  const BranchArtifact length = run("vary_arm_length");
  const BranchArtifact load1 = run("rotate_load_p1");
  const BranchArtifact load9 = run("rotate_load_p9");
  const BranchArtifact pload = run("vary_load");
  const BranchArtifact clamp1 = run("rotate_clamp_p1");
  const BranchArtifact clamp9 = run("rotate_clamp_p9");
  const std::vector<const BranchArtifact*> all = {&arm1, &arm9, &arm1h, &arm9h, &length,
                                                  &load1, &load9, &pload, &clamp1, &clamp9};

  FoldTally t;
  for (const BranchArtifact* a : all) tally(*a, t);
  report(4, t.folds > 0 && t.ok == t.folds,
         std::to_string(t.ok) + "/" + std::to_string(t.folds) +
             " folds in 10 runs: critical eigenvalue near zero, sign change, predicted jump equals oracle jump");
  note(std::to_string(t.unresolved) + " branch point(s) of symmetric systems flagged unresolved, outside the fold rule");

  double d_arm = 0.0, d_load = 0.0;
  for (const BranchArtifact* a : {&arm1, &arm9, &arm1h, &arm9h}) d_arm = std::max(d_arm, max_defect(*a));
  for (const BranchArtifact* a : {&load1, &load9}) d_load = std::max(d_load, max_defect(*a));
  report(5, d_arm < 1e-6 && d_load < 1e-6,
         fmt("max theta defect between xi and xi + 2 pi: rotate-arm %.2e, rotate-load %.2e", d_arm, d_load));

  // Balance of moments checked literally as stated, then with the load
  // moment entering with the opposite sign.
  double literal = 0.0, flipped = 0.0;
  std::size_t points = 0;
  for (const BranchArtifact* a : all) {
    for (const Branch& b : a->branches) {
      for (const BranchPoint& p : b.points) {
        const double m = tip_load_moment(p.state, branch_params(b, p.xi));
        const double jump = p.state.theta_prime_0 - p.state.theta_prime_1;
        literal = std::max(literal, std::abs(jump - m));
        flipped = std::max(flipped, std::abs(jump + m));
        ++points;
      }
    }
  }
  report(6, literal < 1e-6,
         fmt("max |theta'(0) - theta'(1) - [r x n].e_z| = %.3e over %.0f points", literal, static_cast<double>(points)));
  note(fmt("with n(1) = F the identity that holds is theta'(0) - theta'(1) + [r x F].e_z = 0, max error %.3e", flipped));

  hygiene();

  bool any_stable = false;
  for (const Branch& b : arm9.branches)
    for (const BranchPoint& p : b.points) any_stable = any_stable || p.index == 0;
  const auto [count1, alpha1] = most_coexisting(load1);
  std::size_t stable_targets = 0;
  for (const SnapPair& s : clamp9.snaps) stable_targets = std::max(stable_targets, s.targets.size());
  report(8, !any_stable && count1 >= 5 && stable_targets >= 2,
         std::string("rotate-arm (9pi^2/4, 0.25) index-0 points: ") + (any_stable ? "yes" : "none") +
             fmt("; rotate-load (pi^2/4) max coexisting %.0f at alpha %.4f", static_cast<double>(count1), alpha1) +
             fmt("; rotate-clamp (9pi^2/4) max stable snap targets %.0f", static_cast<double>(stable_targets)));
  const auto [count9, alpha9] = most_coexisting(load9);
  note(fmt("rotate-load at P = 9pi^2/4 reaches %.0f coexisting equilibria (alpha %.4f)", static_cast<double>(count9),
           alpha9));

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
