#include "elastica/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "elastica/stability.hpp"

namespace elastica {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

ElasticaParams params_with(const ElasticaParams& base, OrdinateKind kind, double xi) {
  ElasticaParams p = base;
  set_parameter(p, kind, xi);
  return p;
}

BorderedTridiagonal bordered_jacobian(std::span<const double> theta, const Mesh& mesh, const ElasticaParams& p,
                                      OrdinateKind kind) {
  const std::size_t n = theta.size();
  const LinearizedSystem sys = assemble_system(theta, mesh, p);
  BorderedTridiagonal A(n, true);
  A.lower = sys.jacobian.lower;
  A.diag = sys.jacobian.diag;
  A.upper = sys.jacobian.upper;
  A.column = parameter_derivative(theta, mesh, p, kind);
  return A;
}

void set_border(BorderedTridiagonal& A, const Mesh& mesh, const std::vector<double>& t) {
  const std::size_t n = A.block_size();
  for (std::size_t i = 0; i < n; ++i) A.row[i] = mesh.weight(i) * t[i];
  A.corner = t[n];
}

// Arclength residual <theta - theta_c, t>_h + (xi - xi_c) t_xi - ds.
double arclength_residual(const BranchPoint& c, std::span<const double> theta, double xi, double ds) {
  const Mesh& mesh = c.state.mesh;
  double g = (xi - c.xi) * c.tangent.back() - ds;
  for (std::size_t i = 0; i < theta.size(); ++i) g += mesh.weight(i) * (theta[i] - c.state.theta[i]) * c.tangent[i];
  return g;
}

std::size_t critical_ordinal(const SpectrumReport& s) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < s.eigenvalues.size(); ++k) {
    if (std::abs(s.eigenvalues[k]) < std::abs(s.eigenvalues[best])) best = k;
  }
  return best;
}

}  // namespace

void ContinuationSettings::validate() const {
  if (!(ds_min > 0.0 && ds_min <= ds_init && ds_init <= ds_max)) {
    throw std::invalid_argument("step sizes must satisfy 0 < ds_min <= ds_init <= ds_max");
  }
  if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
  if (!std::isfinite(xi_start) || !std::isfinite(xi_end) || xi_start == xi_end) {
    throw std::invalid_argument("sweep range must be finite and non-empty");
  }
  if (!(lower_bound() < upper_bound())) throw std::invalid_argument("empty continuation box");
  if (!(fold_tolerance > 0.0)) throw std::invalid_argument("fold_tolerance must be positive");
  corrector.validate();
}

double ContinuationSettings::lower_bound() const {
  return std::isnan(xi_min) ? std::min(xi_start, xi_end) : xi_min;
}

double ContinuationSettings::upper_bound() const {
  return std::isnan(xi_max) ? std::max(xi_start, xi_end) : xi_max;
}

double tangent_inner(const Mesh& mesh, const std::vector<double>& u, const std::vector<double>& v) {
  const std::size_t n = mesh.size();
  double s = u[n] * v[n];
  for (std::size_t i = 0; i < n; ++i) s += mesh.weight(i) * u[i] * v[i];
  return s;
}

std::optional<TangentResult> compute_tangent(const EquilibriumState& state, double xi, const ElasticaParams& base,
                                             OrdinateKind kind, const std::vector<double>& reference) {
  const Mesh& mesh = state.mesh;
  const std::size_t n = mesh.size();
  const ElasticaParams p = params_with(base, kind, xi);
  BorderedTridiagonal A = bordered_jacobian(state.theta, mesh, p, kind);
  std::vector<double> rhs(n + 1, 0.0);
  rhs[n] = 1.0;

  if (reference.empty()) {
    A.corner = 1.0;
  } else {
    set_border(A, mesh, reference);
  }
  LinearSolution z = solve(A, rhs);
  if (z.status == LinearStatus::Singular) return std::nullopt;
  const double norm = std::sqrt(tangent_inner(mesh, z.x, z.x));
  if (!(norm > 0.0) || !std::isfinite(norm)) return std::nullopt;
  for (double& v : z.x) v /= norm;
  if (!reference.empty() && tangent_inner(mesh, z.x, reference) < 0.0) {
    for (double& v : z.x) v = -v;
  }

  // Determinant of the bordered Jacobian with the new tangent as border row.
  set_border(A, mesh, z.x);
  const LinearSolution check = solve(A, rhs);
  if (check.status == LinearStatus::Singular) return std::nullopt;
  return TangentResult{std::move(z.x), check.determinant_sign};
}

std::optional<BranchPoint> initial_point(const EquilibriumState& seed, const ElasticaParams& params,
                                         const ContinuationSettings& settings, std::string* why) {
  const OrdinateKind kind = settings.param_kind;
  const double xi = parameter_value(params, kind);
  auto tangent = compute_tangent(seed, xi, params, kind, {});
  if (!tangent) {
    if (why) *why = "bordered system is singular at the seed";
    return std::nullopt;
  }
  BranchPoint pt;
  pt.xi = xi;
  pt.state = seed;
  pt.tangent = std::move(tangent->tangent);
  const double heading = settings.direction != 0 ? settings.direction : settings.xi_end - settings.xi_start;
  if (heading * pt.tangent.back() < 0.0) {
    for (double& v : pt.tangent) v = -v;
    tangent->det_sign = -tangent->det_sign;
  }
  pt.xi_dot = pt.tangent.back();
  pt.det_sign = tangent->det_sign;
  pt.ordinate = ordinate(seed, params, kind);
  return pt;
}

StepResult predictor_corrector_step(const BranchPoint& current, double ds, const ElasticaParams& base,
                                    const ContinuationSettings& settings) {
  StepResult out;
  const OrdinateKind kind = settings.param_kind;
  const Mesh& mesh = current.state.mesh;
  const std::size_t n = mesh.size();
  const NewtonSettings& cs = settings.corrector;

  std::vector<double> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = current.state.theta[i] + ds * current.tangent[i];
  double xi = current.xi + ds * current.tangent[n];

  auto evaluate = [&](std::span<const double> th, double x) {
    const std::vector<double> r = assemble_residual(th, mesh, params_with(base, kind, x));
    const double g = arclength_residual(current, th, x, ds);
    const double m = max_norm(r);
    return std::isnan(m) ? m : std::max(m, std::abs(g));
  };

  double norm = evaluate(theta, xi);
  bool converged = false;
  int polish = 0;
  std::vector<double> trial(n);
  while (true) {
    if (!std::isfinite(norm)) {
      out.failure = "corrector produced a non-finite residual";
      return out;
    }
    if (norm <= cs.tol_residual) {
      converged = true;
      if (polish >= 2 || norm == 0.0) break;
    }
    if (out.iterations >= cs.max_iters) break;

    const ElasticaParams p = params_with(base, kind, xi);
    BorderedTridiagonal A = bordered_jacobian(theta, mesh, p, kind);
    set_border(A, mesh, current.tangent);
    std::vector<double> rhs = assemble_residual(theta, mesh, p);
    rhs.push_back(arclength_residual(current, theta, xi, ds));
    for (double& v : rhs) v = -v;
    const LinearSolution step = solve(A, rhs);
    if (step.status == LinearStatus::Singular) {
      if (converged) break;
      out.failure = "singular bordered system in the corrector";
      return out;
    }
    for (std::size_t i = 0; i < n; ++i) trial[i] = theta[i] + step.x[i];
    const double trial_xi = xi + step.x[n];
    const double trial_norm = evaluate(trial, trial_xi);
    if (converged) {
      if (!(trial_norm < 0.1 * norm)) break;
      ++polish;
    }
    theta.swap(trial);
    xi = trial_xi;
    norm = trial_norm;
    ++out.iterations;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "corrector did not converge (residual " << norm << ")";
    out.failure = msg.str();
    return out;
  }

  const ElasticaParams p = params_with(base, kind, xi);
  EquilibriumState state = make_state(mesh, std::move(theta), p);
  auto tangent = compute_tangent(state, xi, base, kind, current.tangent);
  if (!tangent) {
    out.failure = "singular bordered system at the new point";
    return out;
  }
  if (tangent_inner(mesh, tangent->tangent, current.tangent) < settings.min_tangent_cos) {
    out.failure = "tangent turned too far";
    return out;
  }

  BranchPoint& pt = out.point;
  pt.tau = current.tau + ds;
  pt.xi = xi;
  pt.ordinate = ordinate(state, p, kind);
  pt.state = std::move(state);
  pt.tangent = std::move(tangent->tangent);
  pt.xi_dot = pt.tangent.back();
  pt.det_sign = tangent->det_sign;
  out.ok = true;
  return out;
}

void annotate_point(BranchPoint& point, const ElasticaParams& base, OrdinateKind kind) {
  const ElasticaParams p = params_with(base, kind, point.xi);
  point.ordinate = ordinate(point.state, p, kind);
  const SpectrumReport s = spectrum_at(point.state, p);
  point.index = s.index;
  point.mu_min = s.mu_min;
}

std::optional<FoldRecord> detect_and_refine_fold(const BranchPoint& prev, const BranchPoint& next,
                                                 const ElasticaParams& base, const ContinuationSettings& settings) {
  const int s_prev = sign_of(prev.xi_dot);
  const int s_next = sign_of(next.xi_dot);
  if (s_prev == 0 || s_prev * s_next > 0) return std::nullopt;

  FoldRecord rec;
  rec.xi_ddot_sign = sign_of(next.xi_dot - prev.xi_dot);
  const OrdinateKind kind = settings.param_kind;

  double lo = 0.0;
  double hi = next.tau - prev.tau;
  bool found = false;
  if (s_next == 0) {
    rec.at_fold = next;
    found = true;
  }
  for (int it = 0; it < 200 && !found; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    StepResult trial = predictor_corrector_step(prev, mid, base, settings);
    if (!trial.ok) {
      rec.note = "fold refinement failed: " + trial.failure;
      break;
    }
    if (std::abs(trial.point.xi_dot) < settings.fold_tolerance) {
      rec.at_fold = std::move(trial.point);
      found = true;
      break;
    }
    (sign_of(trial.point.xi_dot) == s_prev ? lo : hi) = mid;
  }

  if (!found) {
    rec.kind = SingularityKind::UnresolvedSingularity;
    rec.tau_star = prev.tau + 0.5 * (lo + hi);
    rec.xi_star = 0.5 * (prev.xi + next.xi);
    if (rec.note.empty()) rec.note = "xi_dot could not be driven below the fold tolerance";
    rec.before = prev;
    rec.after = next;
    return rec;
  }

  annotate_point(rec.at_fold, base, kind);
  rec.tau_star = rec.at_fold.tau;
  rec.xi_star = rec.at_fold.xi;

  // Central difference of the ordinate in tau.
  const double h_slope = 1e-5;
  StepResult fwd = predictor_corrector_step(rec.at_fold, h_slope, base, settings);
  StepResult bwd = predictor_corrector_step(rec.at_fold, -h_slope, base, settings);
  if (!fwd.ok || !bwd.ok) {
    rec.kind = SingularityKind::UnresolvedSingularity;
    rec.note = "could not sample the ordinate around the fold";
    rec.before = prev;
    rec.after = next;
    return rec;
  }
  rec.ordinate_slope = (fwd.point.ordinate - bwd.point.ordinate) / (2.0 * h_slope);
  rec.ordinate_slope_sign = sign_of(rec.ordinate_slope);

  // Side samples for the oracle: far enough that the critical eigenvalue is
  // clear of the zero threshold on both sides.
  const ElasticaParams fold_params = params_with(base, kind, rec.xi_star);
  const std::size_t ordinal = critical_ordinal(spectrum_at(rec.at_fold.state, fold_params));
  double delta = 1e-3;
  for (int attempt = 0; attempt < 12; ++attempt) {
    StepResult a = predictor_corrector_step(rec.at_fold, delta, base, settings);
    StepResult b = predictor_corrector_step(rec.at_fold, -delta, base, settings);
    if (!a.ok || !b.ok) {
      delta *= 0.5;
      continue;
    }
    annotate_point(a.point, base, kind);
    annotate_point(b.point, base, kind);
    rec.after = std::move(a.point);
    rec.before = std::move(b.point);
    const SpectrumReport sa = spectrum_at(rec.after.state, params_with(base, kind, rec.after.xi));
    const SpectrumReport sb = spectrum_at(rec.before.state, params_with(base, kind, rec.before.xi));
    const bool clear = std::abs(sa.eigenvalues[ordinal]) > 10.0 * sa.tol_eig &&
                       std::abs(sb.eigenvalues[ordinal]) > 10.0 * sb.tol_eig;
    if (clear || delta >= settings.ds_max) break;
    delta = std::min(2.0 * delta, settings.ds_max);
  }
  if (rec.before.state.theta.empty()) {
    rec.kind = SingularityKind::UnresolvedSingularity;
    rec.note = "could not step away from the fold";
    rec.before = prev;
    rec.after = next;
  }
  return rec;
}

FoldRecord classify_fold(FoldRecord record, OrdinateKind kind, int index_before) {
  record.index_before = index_before;
  if (record.kind == SingularityKind::UnresolvedSingularity || record.xi_ddot_sign == 0 ||
      std::abs(record.ordinate_slope) < 1e-10 || index_before < 0) {
    record.classification = Classification::Degenerate;
    record.mu_dot_sign = 0;
    record.index_after = -1;
    return record;
  }
  const int product = record.xi_ddot_sign * record.ordinate_slope_sign;
  record.mu_dot_sign = kind == OrdinateKind::Theta0 ? product : -product;
  record.index_after = index_before - record.mu_dot_sign;
  record.classification = Classification::Classified;
  return record;
}

Branch trace_branch(const EquilibriumState& seed, const ElasticaParams& params, const ContinuationSettings& settings,
                    int seed_index) {
  settings.validate();
  const OrdinateKind kind = settings.param_kind;
  Branch br;
  br.kind = kind;
  br.params = params;

  const double lo = settings.lower_bound();
  const double hi = settings.upper_bound();
  const double xi0 = parameter_value(params, kind);
  if (xi0 < lo - 1e-12 || xi0 > hi + 1e-12) {
    br.status = BranchStatus::Aborted;
    br.diagnostics = "seed parameter lies outside the sweep range";
    return br;
  }

  std::string why;
  auto first = initial_point(seed, params, settings, &why);
  if (!first) {
    br.status = BranchStatus::Aborted;
    br.diagnostics = why;
    return br;
  }
  annotate_point(*first, params, kind);
  first->predicted_index = seed_index >= 0 ? seed_index : first->index;
  br.points.push_back(std::move(*first));

  // Folds and singularities between the last stored point and `next`;
  // returns the predicted index carried into `next`.
  auto process_segment = [&](BranchPoint& next) {
    const std::size_t prev_idx = br.points.size() - 1;
    const BranchPoint& prev = br.points[prev_idx];
    int predicted = prev.predicted_index;
    std::optional<FoldRecord> rec;
    if (prev.det_sign * next.det_sign < 0) {
      FoldRecord r;
      r.kind = SingularityKind::UnresolvedSingularity;
      r.tau_star = 0.5 * (prev.tau + next.tau);
      r.xi_star = 0.5 * (prev.xi + next.xi);
      r.before = prev;
      r.after = next;
      r.note = "bordered Jacobian determinant changes sign (branch point)";
      rec = std::move(r);
    } else {
      rec = detect_and_refine_fold(prev, next, params, settings);
    }
    // A point landing just past a fold can still count its critical
    // eigenvalue as zero; the fold's oracle already covers that change.
    bool fold_tail = false;
    if (!rec && next.index != prev.index && !br.folds.empty()) {
      const FoldRecord& last = br.folds.back();
      if (last.kind == SingularityKind::Fold && last.next_point == prev_idx && last.verdict == Verdict::Pass &&
          last.oracle_index_after == next.index) {
        const SpectrumReport s = spectrum_at(prev.state, params_with(params, kind, prev.xi));
        for (double mu : s.eigenvalues) fold_tail = fold_tail || std::abs(mu) <= 100.0 * s.tol_eig;
      }
    }
    if (!rec && next.index != prev.index && !fold_tail) {
      FoldRecord r;
      r.kind = SingularityKind::UnresolvedSingularity;
      r.tau_star = 0.5 * (prev.tau + next.tau);
      r.xi_star = 0.5 * (prev.xi + next.xi);
      r.before = prev;
      r.after = next;
      r.note = "oracle index changes without a fold";
      rec = std::move(r);
    }
    if (rec) {
      rec->prev_point = prev_idx;
      rec->next_point = prev_idx + 1;
      *rec = classify_fold(std::move(*rec), kind, predicted);
      *rec = validate_fold(br, std::move(*rec));
      if (rec->kind == SingularityKind::UnresolvedSingularity) {
        rec->oracle_index_before = prev.index;
        rec->oracle_index_after = next.index;
      }
      const bool carry = rec->classification == Classification::Classified && rec->verdict == Verdict::Pass;
      predicted = carry ? rec->index_after : next.index;
      br.folds.push_back(std::move(*rec));
    }
    next.predicted_index = predicted;
  };

  double ds = settings.ds_init;
  int easy = 0;
  int steps = 0;
  br.status = BranchStatus::StepLimit;
  for (; steps < settings.max_steps; ++steps) {
    const BranchPoint& cur = br.points.back();
    StepResult st = predictor_corrector_step(cur, ds, params, settings);
    if (!st.ok) {
      ds *= 0.5;
      easy = 0;
      if (ds < settings.ds_min) {
        std::ostringstream msg;
        msg << "step size fell below ds_min at " << to_string(kind) << " = " << cur.xi << ": " << st.failure;
        br.status = BranchStatus::Aborted;
        br.diagnostics = msg.str();
        break;
      }
      continue;
    }

    BranchPoint next = std::move(st.point);
    const bool leaving = next.xi < lo || next.xi > hi;
    if (leaving) {
      // Land on the boundary by bisection on the step length.
      const double bound = next.xi > hi ? hi : lo;
      double a = 0.0;
      double b = ds;
      const int s_cur = sign_of(cur.xi - bound);
      std::optional<BranchPoint> landed;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        StepResult trial = predictor_corrector_step(cur, mid, params, settings);
        if (!trial.ok) break;
        const double gap = trial.point.xi - bound;
        if (std::abs(gap) <= 1e-12 * std::max(1.0, std::abs(bound))) {
          landed = std::move(trial.point);
          break;
        }
        (sign_of(gap) == s_cur ? a : b) = mid;
      }
      br.status = BranchStatus::Completed;
      if (landed) {
        annotate_point(*landed, params, kind);
        process_segment(*landed);
        br.points.push_back(std::move(*landed));
      } else {
        br.diagnostics = "could not land exactly on the sweep boundary";
      }
      break;
    }

    annotate_point(next, params, kind);
    process_segment(next);
    br.points.push_back(std::move(next));

    const BranchPoint& first_pt = br.points.front();
    const BranchPoint& last = br.points.back();
    if (last.tau > 10.0 * settings.ds_max && br.points.size() > 10) {
      std::vector<double> diff(last.tangent.size());
      for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = last.state.theta[i] - first_pt.state.theta[i];
      diff.back() = last.xi - first_pt.xi;
      const double dist = std::sqrt(tangent_inner(last.state.mesh, diff, diff));
      if (dist < 0.75 * ds && tangent_inner(last.state.mesh, last.tangent, first_pt.tangent) > 0.0) {
        br.status = BranchStatus::ClosedLoop;
        break;
      }
    }

    if (st.iterations <= settings.easy_iterations) {
      if (++easy >= settings.grow_after) {
        ds = std::min(2.0 * ds, settings.ds_max);
        easy = 0;
      }
    } else {
      easy = 0;
    }
  }
  if (br.status == BranchStatus::StepLimit) br.diagnostics = "step budget exhausted";
  return br;
}

}  // namespace elastica
