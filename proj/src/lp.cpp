#include "capmatch/lp.hpp"

#include <cmath>
#include <stdexcept>

namespace capmatch {

namespace {

constexpr double kPivotTol = 1e-9;

struct Tableau {
  Eigen::MatrixXd body;        // m x ncols, kept as B^{-1} A by pivoting
  Eigen::VectorXd rhs;         // B^{-1} h, kept nonnegative
  std::vector<int> basis;      // basic column per row
  int n_structural = 0;
  int n_slack = 0;

  int cols() const { return static_cast<int>(body.cols()); }
  int rows() const { return static_cast<int>(body.rows()); }
  int artificial_of(int row) const { return n_structural + n_slack + row; }
  bool is_artificial(int col) const { return col >= n_structural + n_slack; }

  void pivot(int row, int col) {
    const double piv = body(row, col);
    body.row(row) /= piv;
    rhs(row) /= piv;
    body(row, col) = 1.0;  // kill roundoff on the pivot itself
    for (int r = 0; r < rows(); ++r) {
      if (r == row) continue;
      const double f = body(r, col);
      if (f == 0.0) continue;
      body.row(r) -= f * body.row(row);
      rhs(r) -= f * rhs(row);
      body(r, col) = 0.0;
    }
    basis[row] = col;
  }
};

// Bland's rule: entering = lowest-index improving column, leaving = lowest
// basis index among the ratio-test minimizers.
enum class PivotResult { optimal, improved, unbounded };

PivotResult simplex_iterate(Tableau& t, const Eigen::VectorXd& costs, bool allow_artificial) {
  Eigen::VectorXd dual_weights(t.rows());
  for (int r = 0; r < t.rows(); ++r) dual_weights(r) = costs(t.basis[r]);

  int entering = -1;
  for (int c = 0; c < t.cols(); ++c) {
    if (!allow_artificial && t.is_artificial(c)) continue;
    const double reduced = costs(c) - dual_weights.dot(t.body.col(c));
    if (reduced < -kPivotTol) {
      entering = c;
      break;
    }
  }
  if (entering < 0) return PivotResult::optimal;

  int leaving = -1;
  double best_ratio = 0.0;
  for (int r = 0; r < t.rows(); ++r) {
    const double a = t.body(r, entering);
    if (a <= kPivotTol) continue;
    const double ratio = t.rhs(r) / a;
    if (leaving < 0 || ratio < best_ratio - kPivotTol * (1.0 + std::abs(best_ratio)) ||
        (std::abs(ratio - best_ratio) <= kPivotTol * (1.0 + std::abs(best_ratio)) &&
         t.basis[r] < t.basis[leaving])) {
      leaving = r;
      best_ratio = ratio;
    }
  }
  if (leaving < 0) return PivotResult::unbounded;

  t.pivot(leaving, entering);
  return PivotResult::improved;
}

void run_simplex(Tableau& t, const Eigen::VectorXd& costs, bool allow_artificial,
                 LpStatus& status) {
  const long max_iters = 1000 + 200L * (t.rows() + t.cols());
  for (long it = 0; it < max_iters; ++it) {
    switch (simplex_iterate(t, costs, allow_artificial)) {
      case PivotResult::optimal:
        status = LpStatus::optimal;
        return;
      case PivotResult::unbounded:
        status = LpStatus::unbounded;
        return;
      case PivotResult::improved:
        break;
    }
  }
  throw std::runtime_error("lp: simplex failed to terminate");
}

}  // namespace

LpSolution solve(const LpProblem& problem) {
  const int n = static_cast<int>(problem.objective.size());
  const int m_user = static_cast<int>(problem.constraints.rows());
  if (problem.constraints.cols() != n || problem.rhs.size() != m_user ||
      static_cast<int>(problem.sense.size()) != m_user) {
    throw std::invalid_argument("lp: dimension mismatch");
  }
  if (!problem.objective.allFinite() || !problem.constraints.allFinite() ||
      !problem.rhs.allFinite()) {
    throw std::invalid_argument("lp: nonfinite coefficients");
  }

  const Eigen::VectorXd lower =
      problem.lower.size() ? problem.lower : Eigen::VectorXd::Zero(n);
  if (lower.size() != n) throw std::invalid_argument("lp: lower bound size mismatch");

  // Shift variables so z' = z - lower >= 0, and fold finite upper bounds in
  // as internal <= rows.
  std::vector<Sense> sense = problem.sense;
  Eigen::VectorXd shifted_rhs = problem.rhs - problem.constraints * lower;
  std::vector<int> upper_rows;
  if (problem.upper.size()) {
    if (problem.upper.size() != n) throw std::invalid_argument("lp: upper bound size mismatch");
    for (int v = 0; v < n; ++v)
      if (std::isfinite(problem.upper(v))) upper_rows.push_back(v);
  }
  const int m = m_user + static_cast<int>(upper_rows.size());

  int n_slack = static_cast<int>(upper_rows.size());
  for (Sense s : problem.sense)
    if (s != Sense::eq) ++n_slack;

  Tableau t;
  t.n_structural = n;
  t.n_slack = n_slack;
  t.body = Eigen::MatrixXd::Zero(m, n + n_slack + m);
  t.rhs.resize(m);
  t.basis.assign(m, -1);
  std::vector<double> row_sign(m, 1.0);

  int slack_cursor = n;
  for (int r = 0; r < m; ++r) {
    double b;
    if (r < m_user) {
      t.body.row(r).head(n) = problem.constraints.row(r);
      b = shifted_rhs(r);
    } else {
      const int v = upper_rows[r - m_user];
      t.body(r, v) = 1.0;
      b = problem.upper(v) - lower(v);
      sense.push_back(Sense::le);
    }
    if (sense[r] == Sense::le) t.body(r, slack_cursor++) = 1.0;
    if (sense[r] == Sense::ge) t.body(r, slack_cursor++) = -1.0;
    if (b < 0) {
      t.body.row(r) = -t.body.row(r);
      b = -b;
      row_sign[r] = -1.0;
    }
    t.rhs(r) = b;
    t.body(r, t.artificial_of(r)) = 1.0;
    t.basis[r] = t.artificial_of(r);
  }

  LpSolution out;

  // Phase 1: drive the artificial variables to zero.
  Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(t.cols());
  phase1.tail(m).setOnes();
  LpStatus status = LpStatus::optimal;
  run_simplex(t, phase1, true, status);
  if (status != LpStatus::optimal)
    throw std::runtime_error("lp: phase 1 reported unbounded");
  double infeas = 0.0;
  for (int r = 0; r < m; ++r)
    if (t.is_artificial(t.basis[r])) infeas += t.rhs(r);
  if (infeas > kLpTol * (1.0 + t.rhs.cwiseAbs().maxCoeff())) {
    out.status = LpStatus::infeasible;
    return out;
  }

  // Pivot leftover zero-level artificials out where the row is not redundant.
  for (int r = 0; r < m; ++r) {
    if (!t.is_artificial(t.basis[r])) continue;
    for (int c = 0; c < n + n_slack; ++c) {
      if (std::abs(t.body(r, c)) > kPivotTol) {
        t.pivot(r, c);
        break;
      }
    }
  }

  // Phase 2 on the real objective; artificials stay out.
  Eigen::VectorXd phase2 = Eigen::VectorXd::Zero(t.cols());
  phase2.head(n) = problem.objective;
  run_simplex(t, phase2, false, status);
  if (status == LpStatus::unbounded) {
    out.status = LpStatus::unbounded;
    return out;
  }

  out.status = LpStatus::optimal;
  out.primal = lower;
  for (int r = 0; r < m; ++r)
    if (t.basis[r] < n) out.primal(t.basis[r]) += t.rhs(r);
  out.objective = problem.objective.dot(out.primal);

  // Basis duals read off the artificial columns: their reduced cost equals
  // -y_r for the row system as solved. Undo the sign normalization and map
  // to the documented multiplier orientation per row sense.
  Eigen::VectorXd dual_weights(m);
  for (int r = 0; r < m; ++r) dual_weights(r) = phase2(t.basis[r]);
  out.dual.resize(m_user);
  for (int r = 0; r < m_user; ++r) {
    const double reduced = -dual_weights.dot(t.body.col(t.artificial_of(r)));
    const double y_row = -reduced * row_sign[r];
    out.dual(r) = (sense[r] == Sense::ge) ? y_row : -y_row;
  }
  return out;
}

}  // namespace capmatch
