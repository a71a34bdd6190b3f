#include "elastica/stability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elastica/symmetric_eigen.hpp"

namespace elastica {

namespace {

std::vector<double> mass_sqrt(const SecondVariationOperator& op) {
  const double h = op.mesh.spacing();
  std::vector<double> m(op.size(), std::sqrt(h));
  m.back() = std::sqrt(0.5 * h);
  return m;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::string to_string(SingularityKind kind) {
  return kind == SingularityKind::Fold ? "fold" : "unresolved_singularity";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::NotChecked: return "not_checked";
    case Verdict::Pass: return "pass";
    case Verdict::OracleOnly: return "oracle_only";
    case Verdict::Mismatch: return "mismatch";
    case Verdict::Unresolved: return "unresolved";
  }
  return "not_checked";
}

Verdict parse_verdict(const std::string& text) {
  for (Verdict v : {Verdict::NotChecked, Verdict::Pass, Verdict::OracleOnly, Verdict::Mismatch,
                    Verdict::Unresolved}) {
    if (to_string(v) == text) return v;
  }
  throw std::invalid_argument("unknown verdict '" + text + "'");
}

std::string to_string(BranchStatus status) {
  switch (status) {
    case BranchStatus::Completed: return "completed";
    case BranchStatus::ClosedLoop: return "closed_loop";
    case BranchStatus::StepLimit: return "step_limit";
    case BranchStatus::Aborted: return "aborted";
  }
  return "aborted";
}

std::vector<double> SecondVariationOperator::apply(std::span<const double> nodal) const {
  if (nodal.size() != size()) throw std::invalid_argument("nodal vector has the wrong length");
  const auto m = mass_sqrt(*this);
  const std::size_t n = size();
  std::vector<double> u(n), out(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = m[i] * nodal[i];
  for (std::size_t i = 0; i < n; ++i) {
    double w = diagonal[i] * u[i];
    if (i > 0) w += off_diagonal[i - 1] * u[i - 1];
    if (i + 1 < n) w += off_diagonal[i] * u[i + 1];
    out[i] = w / m[i];
  }
  return out;
}

double SecondVariationOperator::inner(std::span<const double> u, std::span<const double> v) const {
  const auto m = mass_sqrt(*this);
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += m[i] * m[i] * u[i] * v[i];
  return s;
}

SecondVariationOperator assemble_operator(const EquilibriumState& state, const ElasticaParams& params) {
  const std::size_t n = state.theta.size();
  if (n != state.mesh.size() || n < 3) throw MeshError("state does not match its mesh");
  const double h = state.mesh.spacing();
  const double P = params.load;
  const double inv_h2 = 1.0 / (h * h);

  SecondVariationOperator op{{}, {}, 0.0, state.mesh};
  op.diagonal.resize(n - 1);
  op.off_diagonal.assign(n - 2, -inv_h2);
  for (std::size_t i = 1; i + 1 < n; ++i) op.diagonal[i - 1] = 2.0 * inv_h2 - P * std::cos(state.theta[i] + params.alpha);
  const double theta1 = state.theta.back();
  op.bc_tip_coeff = -params.epsilon * P * std::cos(tip_angle(theta1, params));
  op.diagonal.back() = 2.0 * inv_h2 - P * std::cos(theta1 + params.alpha) + 2.0 / h * op.bc_tip_coeff;
  op.off_diagonal.back() = -std::sqrt(2.0) * inv_h2;
  return op;
}

SpectrumReport compute_spectrum(const SecondVariationOperator& op) {
  SpectrumReport report;
  report.eigenvalues = tridiagonal_eigenvalues(op.diagonal, op.off_diagonal);
  double scale = 0.0;
  for (double mu : report.eigenvalues) scale = std::max(scale, std::abs(mu));
  report.tol_eig = kRelativeEigenTolerance * scale;
  report.mu_min = report.eigenvalues.front();
  report.index = static_cast<int>(
      std::count_if(report.eigenvalues.begin(), report.eigenvalues.end(), [&](double mu) { return mu < -report.tol_eig; }));
  return report;
}

SpectrumReport spectrum_at(const EquilibriumState& state, const ElasticaParams& params) {
  return compute_spectrum(assemble_operator(state, params));
}

CriticalMode critical_mode(const SecondVariationOperator& op) {
  const TridiagonalEigen eig = tridiagonal_eigensystem(op.diagonal, op.off_diagonal);
  std::size_t best = 0;
  for (std::size_t k = 1; k < eig.values.size(); ++k) {
    if (std::abs(eig.values[k]) < std::abs(eig.values[best])) best = k;
  }
  const auto m = mass_sqrt(op);
  CriticalMode out{eig.values[best], best, eig.vectors[best]};
  // Unit vector of the symmetric form maps to an h-normalized nodal mode.
  for (std::size_t i = 0; i < out.mode.size(); ++i) out.mode[i] /= m[i];
  return out;
}

FoldRecord validate_fold(const Branch& branch, FoldRecord record) {
  const ElasticaParams& base = branch.params;
  auto params_at = [&](const BranchPoint& p) {
    ElasticaParams q = base;
    set_parameter(q, branch.kind, p.xi);
    return q;
  };

  if (record.at_fold.state.theta.empty()) {
    record.verdict = Verdict::Unresolved;
    if (record.note.empty()) record.note = "singularity could not be refined";
    return record;
  }

  const ElasticaParams fold_params = params_at(record.at_fold);
  const SecondVariationOperator op = assemble_operator(record.at_fold.state, fold_params);
  const SpectrumReport fold_spec = compute_spectrum(op);
  const CriticalMode crit = critical_mode(op);
  record.mu_at_fold = crit.mu;

  if (!record.at_fold.tangent.empty()) {
    std::vector<double> t(record.at_fold.tangent.begin() + 1, record.at_fold.tangent.end() - 1);
    const double tt = op.inner(t, t);
    if (tt > 0.0) record.mode_alignment = std::abs(op.inner(crit.mode, t)) / std::sqrt(tt * op.inner(crit.mode, crit.mode));
  }

  if (record.before.state.theta.empty() || record.after.state.theta.empty()) {
    record.verdict = Verdict::Unresolved;
    record.note = "missing side samples";
    return record;
  }
  const SpectrumReport before = spectrum_at(record.before.state, params_at(record.before));
  const SpectrumReport after = spectrum_at(record.after.state, params_at(record.after));
  record.mu_before = before.eigenvalues[crit.ordinal];
  record.mu_after = after.eigenvalues[crit.ordinal];
  record.oracle_index_before = before.index;
  record.oracle_index_after = after.index;

  if (record.kind == SingularityKind::UnresolvedSingularity) {
    record.verdict = Verdict::Unresolved;
    return record;
  }

  std::ostringstream why;
  const bool near_zero = std::abs(crit.mu) < 100.0 * fold_spec.tol_eig;
  if (!near_zero) why << "critical eigenvalue " << crit.mu << " not within 100 tol_eig = " << 100.0 * fold_spec.tol_eig << "; ";
  const bool flips = sign_of(record.mu_before) * sign_of(record.mu_after) < 0;
  if (!flips) why << "critical eigenvalue does not change sign (" << record.mu_before << ", " << record.mu_after << "); ";

  if (record.classification == Classification::Degenerate) {
    record.verdict = (near_zero && flips) ? Verdict::OracleOnly : Verdict::Mismatch;
  } else {
    const int predicted = record.index_after - record.index_before;
    const int observed = after.index - before.index;
    const bool jump_ok = predicted == observed;
    if (!jump_ok) why << "predicted index jump " << predicted << " but oracle gives " << observed << "; ";
    record.verdict = (near_zero && flips && jump_ok) ? Verdict::Pass : Verdict::Mismatch;
  }
  const std::string msg = why.str();
  if (!msg.empty()) record.note = msg.substr(0, msg.size() - 2);
  return record;
}

void enforce_fold_law(const Branch& branch) {
  for (const FoldRecord& f : branch.folds) {
    if (f.verdict == Verdict::Mismatch) {
      std::ostringstream msg;
      msg << "fold at " << to_string(branch.kind) << " = " << f.xi_star << " (tau = " << f.tau_star << "): " << f.note;
      throw FoldClassificationMismatch(msg.str());
    }
  }
}

}  // namespace elastica
