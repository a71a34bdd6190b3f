#include "elastica/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace elastica {

BorderedTridiagonal::BorderedTridiagonal(std::size_t n, bool bordered)
    : lower(n, 0.0),
      diag(n, 0.0),
      upper(n, 0.0),
      column(bordered ? n : 0, 0.0),
      row(bordered ? n : 0, 0.0),
      n_(n),
      bordered_(bordered) {
  if (n == 0) throw std::invalid_argument("empty tridiagonal block");
}

double BorderedTridiagonal::at(std::size_t i, std::size_t j) const {
  if (i < n_ && j < n_) {
    if (i == j) return diag[i];
    if (j + 1 == i) return lower[i];
    if (i + 1 == j) return upper[i];
    return 0.0;
  }
  if (!bordered_ || i > n_ || j > n_) throw std::out_of_range("matrix index");
  if (i < n_) return column[i];
  if (j < n_) return row[j];
  return corner;
}

std::vector<double> BorderedTridiagonal::multiply(std::span<const double> x) const {
  if (x.size() != size()) throw std::invalid_argument("dimension mismatch in multiply");
  std::vector<double> y(size(), 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = diag[i] * x[i];
    if (i > 0) acc += lower[i] * x[i - 1];
    if (i + 1 < n_) acc += upper[i] * x[i + 1];
    if (bordered_) acc += column[i] * x[n_];
    y[i] = acc;
  }
  if (bordered_) {
    double acc = corner * x[n_];
    for (std::size_t j = 0; j < n_; ++j) acc += row[j] * x[j];
    y[n_] = acc;
  }
  return y;
}

namespace {

// A row under elimination.  c[head] is the coefficient of column `start`;
// `last` is the coefficient of the border column.
struct WorkRow {
  std::size_t start = 0;
  std::size_t head = 0;
  std::vector<double> c;
  double last = 0.0;
  double rhs = 0.0;
  double scale = 0.0;

  double lead() const { return head < c.size() ? c[head] : 0.0; }
  std::size_t length() const { return c.size() - head; }
};

double row_scale(const WorkRow& r) {
  double s = std::abs(r.last);
  for (std::size_t j = r.head; j < r.c.size(); ++j) s = std::max(s, std::abs(r.c[j]));
  return s;
}

// target -= (target.lead / pivot.lead) * pivot, then drop the eliminated column.
void eliminate(WorkRow& target, const WorkRow& pivot) {
  const double f = target.lead() / pivot.lead();
  if (f != 0.0) {
    const std::size_t need = target.head + pivot.length();
    if (target.c.size() < need) target.c.resize(need, 0.0);
    for (std::size_t j = 0; j < pivot.length(); ++j) target.c[target.head + j] -= f * pivot.c[pivot.head + j];
    target.last -= f * pivot.last;
    target.rhs -= f * pivot.rhs;
  }
  ++target.head;
  ++target.start;
}

WorkRow band_row(const BorderedTridiagonal& m, std::size_t i, double rhs) {
  const std::size_t n = m.block_size();
  WorkRow r;
  r.start = i == 0 ? 0 : i - 1;
  if (i > 0) r.c.push_back(m.lower[i]);
  r.c.push_back(m.diag[i]);
  if (i + 1 < n) r.c.push_back(m.upper[i]);
  r.last = m.bordered() ? m.column[i] : 0.0;
  r.rhs = rhs;
  r.scale = row_scale(r);
  return r;
}

}  // namespace

LinearSolution solve(const BorderedTridiagonal& matrix, std::span<const double> rhs, double pivot_tolerance) {
  const std::size_t n = matrix.block_size();
  const bool bordered = matrix.bordered();
  if (rhs.size() != matrix.size()) throw std::invalid_argument("right-hand side has wrong size");

  LinearSolution out;
  out.min_relative_pivot = std::numeric_limits<double>::infinity();
  int sign = 1;

  auto check_pivot = [&](double pivot, double scale) {
    const double rel = scale > 0.0 ? std::abs(pivot) / scale : 0.0;
    out.min_relative_pivot = std::min(out.min_relative_pivot, rel);
    if (!(rel >= pivot_tolerance)) return false;
    if (pivot < 0.0) sign = -sign;
    return true;
  };
  auto singular = [&]() {
    out.status = LinearStatus::Singular;
    out.determinant_sign = 0;
    out.x.clear();
    return out;
  };

  std::vector<WorkRow> upper_rows;
  upper_rows.reserve(n);

  WorkRow occupant = band_row(matrix, 0, rhs[0]);
  WorkRow border;
  if (bordered) {
    border.start = 0;
    border.c = matrix.row;
    border.last = matrix.corner;
    border.rhs = rhs[n];
    border.scale = row_scale(border);
  }

  for (std::size_t k = 0; k < n; ++k) {
    const bool has_next = k + 1 < n;
    WorkRow next;
    if (has_next) next = band_row(matrix, k + 1, rhs[k + 1]);

    enum { kOccupant, kNext, kBorder } choice = kOccupant;
    double best = std::abs(occupant.lead());
    if (has_next && std::abs(next.lead()) > best) {
      choice = kNext;
      best = std::abs(next.lead());
    }
    if (bordered && std::abs(border.lead()) > best) choice = kBorder;

    WorkRow pivot;
    switch (choice) {
      case kOccupant:
        pivot = std::move(occupant);
        if (has_next) eliminate(next, pivot);
        if (bordered) eliminate(border, pivot);
        if (has_next) occupant = std::move(next);
        break;
      case kNext:
        sign = -sign;
        pivot = std::move(next);
        eliminate(occupant, pivot);
        if (bordered) eliminate(border, pivot);
        break;
      case kBorder:
        sign = -sign;
        pivot = std::move(border);
        eliminate(occupant, pivot);
        if (has_next) {
          eliminate(next, pivot);
          border = std::move(occupant);
          occupant = std::move(next);
        } else {
          border = std::move(occupant);
        }
        break;
    }
    if (!check_pivot(pivot.lead(), pivot.scale)) return singular();
    upper_rows.push_back(std::move(pivot));
  }

  std::vector<double> x(matrix.size(), 0.0);
  double x_border = 0.0;
  if (bordered) {
    if (!check_pivot(border.last, border.scale)) return singular();
    x_border = border.rhs / border.last;
    x[n] = x_border;
  }
  for (std::size_t kk = n; kk-- > 0;) {
    const WorkRow& r = upper_rows[kk];
    double acc = r.rhs - r.last * x_border;
    for (std::size_t j = 1; j < r.length(); ++j) acc -= r.c[r.head + j] * x[kk + j];
    x[kk] = acc / r.lead();
  }
  out.x = std::move(x);
  out.determinant_sign = sign;
  return out;
}

}  // namespace elastica
