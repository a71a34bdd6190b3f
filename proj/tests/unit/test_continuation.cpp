#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "elastica/buckling.hpp"
#include "elastica/continuation.hpp"
#include "elastica/stability.hpp"

using namespace elastica;

namespace {

constexpr double kPi = std::numbers::pi;

ContinuationSettings arm_sweep() {
  ContinuationSettings s;
  s.param_kind = OrdinateKind::Psi;
  s.xi_start = 0.0;
  s.xi_end = 6 * kPi;
  s.xi_min = -2 * kPi;
  s.direction = -1;
  return s;
}

double theta_distance(const EquilibriumState& a, const EquilibriumState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.theta.size(); ++i) d = std::max(d, std::abs(a.theta[i] - b.theta[i]));
  return d;
}

}  // namespace

TEST(Settings, RejectsInconsistentSteps) {
  ContinuationSettings s;
  s.ds_min = 0.1;
  s.ds_init = 0.01;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  ContinuationSettings e;
  e.xi_end = e.xi_start;
  EXPECT_THROW(e.validate(), std::invalid_argument);
}

TEST(Tangent, IsUnitAndHeadsTowardsEnd) {
  const ElasticaParams p{kPi * kPi / 4, 0.0, 0.25, 0.0, 0.0};
  const EquilibriumState seed = straight_state(Mesh(101), p);
  ContinuationSettings s;
  s.param_kind = OrdinateKind::Epsilon;
  s.xi_start = 0.25;
  s.xi_end = -0.5;
  const auto pt = initial_point(seed, p, s);
  ASSERT_TRUE(pt.has_value());
  EXPECT_NEAR(tangent_inner(seed.mesh, pt->tangent, pt->tangent), 1.0, 1e-12);
  EXPECT_LT(pt->xi_dot, 0.0);
  // Straight rods stay straight in epsilon: the tangent is pure parameter.
  EXPECT_NEAR(std::abs(pt->xi_dot), 1.0, 1e-12);
}

TEST(Trace, TrivialBranchStaysStraight) {
  const ElasticaParams p{kPi * kPi / 4, 0.0, 0.5, 0.0, 0.0};
  const EquilibriumState seed = straight_state(Mesh(101), p);
  ContinuationSettings s;
  s.param_kind = OrdinateKind::Epsilon;
  s.xi_start = 0.5;
  s.xi_end = 0.1;
  const Branch b = trace_branch(seed, p, s);
  ASSERT_EQ(b.status, BranchStatus::Completed);
  EXPECT_NEAR(b.points.back().xi, 0.1, 1e-10);
  for (const BranchPoint& pt : b.points) {
    for (double t : pt.state.theta) EXPECT_NEAR(t, 0.0, 1e-12);
  }
  EXPECT_TRUE(b.folds.empty());
}

TEST(Trace, StepGrowsToMaximumOnEasyBranch) {
  const ElasticaParams p{kPi * kPi / 4, 0.0, 0.5, 0.0, 0.0};
  const EquilibriumState seed = straight_state(Mesh(51), p);
  ContinuationSettings s;
  s.param_kind = OrdinateKind::Epsilon;
  s.xi_start = 0.5;
  // Stops short of the pitchfork at epsilon = 0.
  s.xi_end = 0.05;
  s.ds_init = 0.001;
  s.ds_max = 0.04;
  const Branch b = trace_branch(seed, p, s);
  double largest = 0.0;
  for (std::size_t i = 1; i < b.points.size(); ++i) largest = std::max(largest, b.points[i].tau - b.points[i - 1].tau);
  EXPECT_NEAR(largest, 0.04, 1e-12);
}

TEST(Trace, PitchforksOfTheStraightRodAreFlagged) {
  // Loading the perfect rod crosses its buckling loads at branch points, which
  // the diagram rule does not cover.
  const double eps = 0.25;
  const ElasticaParams p{0.5, 0.0, eps, 0.0, 0.0};
  const EquilibriumState seed = straight_state(Mesh(101), p);
  ContinuationSettings s;
  s.param_kind = OrdinateKind::LoadP;
  s.xi_start = 0.5;
  s.xi_end = 20.0;
  const Branch b = trace_branch(seed, p, s);
  ASSERT_EQ(b.status, BranchStatus::Completed);
  const auto loads = critical_loads(eps, 2).roots;
  ASSERT_EQ(b.folds.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(b.folds[k].kind, SingularityKind::UnresolvedSingularity);
    EXPECT_EQ(b.folds[k].verdict, Verdict::Unresolved);
    EXPECT_NEAR(b.folds[k].xi_star, loads[k], 0.5);
  }
  EXPECT_EQ(b.points.back().index, 2);
}

TEST(Trace, FoldsAreRefinedAndPassTheOracle) {
  const ElasticaParams p{kPi * kPi / 4, 0.0, 0.25, 0.0, 0.0};
  const EquilibriumState seed = straight_state(Mesh(201), p);
  const Branch b = trace_branch(seed, p, arm_sweep(), straight_branch_index(p.load, p.epsilon));
  ASSERT_EQ(b.status, BranchStatus::Completed);
  ASSERT_GE(b.folds.size(), 3u);
  for (const FoldRecord& f : b.folds) {
    EXPECT_EQ(f.kind, SingularityKind::Fold);
    EXPECT_LT(std::abs(f.at_fold.xi_dot), 1e-8);
    EXPECT_EQ(f.verdict, Verdict::Pass) << f.note;
    EXPECT_EQ(std::abs(f.index_after - f.index_before), 1);
  }
  // Consecutive folds of the periodic branch are 2 pi apart.
  for (std::size_t k = 2; k < b.folds.size(); ++k) {
    EXPECT_NEAR(std::abs(b.folds[k].xi_star - b.folds[k - 2].xi_star), 2 * kPi, 1e-6);
  }
}

TEST(Trace, PredictedIndexAgreesWithOracle) {
  const ElasticaParams p{kPi * kPi / 4, 0.0, 0.5, 0.0, 0.0};
  const EquilibriumState seed = straight_state(Mesh(201), p);
  const Branch b = trace_branch(seed, p, arm_sweep(), straight_branch_index(p.load, p.epsilon));
  std::size_t checked = 0;
  for (const BranchPoint& pt : b.points) {
    const SpectrumReport s = spectrum_at(pt.state, [&] {
      ElasticaParams q = p;
      q.psi = pt.xi;
      return q;
    }());
    if (std::abs(s.mu_min) < 1e-3) continue;
    EXPECT_EQ(pt.predicted_index, pt.index);
    ++checked;
  }
  EXPECT_GT(checked, 100u);
}

TEST(Trace, ReversingReturnsToTheSeed) {
  const ElasticaParams p{kPi * kPi / 4, 0.0, 0.25, 0.0, 0.0};
  const EquilibriumState seed = straight_state(Mesh(101), p);
  ContinuationSettings fwd;
  fwd.param_kind = OrdinateKind::Psi;
  fwd.xi_start = 0.0;
  fwd.xi_end = 0.5;
  const Branch out = trace_branch(seed, p, fwd);
  ASSERT_EQ(out.status, BranchStatus::Completed);
  ElasticaParams q = p;
  q.psi = out.points.back().xi;
  ContinuationSettings back = fwd;
  back.xi_start = q.psi;
  back.xi_end = 0.0;
  const Branch home = trace_branch(out.points.back().state, q, back);
  ASSERT_EQ(home.status, BranchStatus::Completed);
  EXPECT_NEAR(home.points.back().xi, 0.0, 1e-10);
  EXPECT_LT(theta_distance(home.points.back().state, seed), 1e-8);
}

TEST(ClassifyFold, SignRule) {
  FoldRecord r;
  r.kind = SingularityKind::Fold;
  r.xi_ddot_sign = 1;
  r.ordinate_slope = 2.0;
  r.ordinate_slope_sign = 1;
  const FoldRecord free_end = classify_fold(r, OrdinateKind::Psi, 1);
  EXPECT_EQ(free_end.mu_dot_sign, -1);
  EXPECT_EQ(free_end.index_after, 2);
  const FoldRecord clamp = classify_fold(r, OrdinateKind::Theta0, 1);
  EXPECT_EQ(clamp.mu_dot_sign, 1);
  EXPECT_EQ(clamp.index_after, 0);
  r.ordinate_slope = 0.0;
  r.ordinate_slope_sign = 0;
  EXPECT_EQ(classify_fold(r, OrdinateKind::Psi, 1).classification, Classification::Degenerate);
}
