#pragma once

#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace capmatch {

inline constexpr double kLpTol = 1e-8;

enum class Sense { le, eq, ge };

// min objective . z  subject to  constraints(r,:) . z  {<=,=,>=}  rhs(r),
// lower <= z <= upper (lower defaults to 0, upper to +inf).
struct LpProblem {
  Eigen::VectorXd objective;
  Eigen::MatrixXd constraints;
  Eigen::VectorXd rhs;
  std::vector<Sense> sense;
  Eigen::VectorXd lower;  // empty means all zero
  Eigen::VectorXd upper;  // empty means all +inf

  static LpProblem minimize(Eigen::VectorXd c) {
    LpProblem p;
    p.objective = std::move(c);
    p.constraints.resize(0, p.objective.size());
    return p;
  }
  void add_row(const Eigen::VectorXd& coeffs, Sense s, double bound) {
    constraints.conservativeResize(constraints.rows() + 1, objective.size());
    constraints.row(constraints.rows() - 1) = coeffs.transpose();
    rhs.conservativeResize(rhs.size() + 1);
    rhs(rhs.size() - 1) = bound;
    sense.push_back(s);
  }
};

enum class LpStatus { optimal, infeasible, unbounded };

// Duals follow the multiplier convention of a minimization: dual(r) >= 0 for
// inequality rows and free for equality rows, with complementary slackness
// dual(r) * (rhs(r) - row(r).z*) = 0 on <= rows. The dual objective equals
//   sum_ge dual*rhs - sum_le dual*rhs - sum_eq dual*rhs,
// and matches the primal objective at optimality (strong duality).
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd primal;
  Eigen::VectorXd dual;
  double objective = std::numeric_limits<double>::quiet_NaN();
};

// Dense two-phase primal simplex with Bland's anti-cycling rule. Equality
// rows carry no slack, so their multipliers come unambiguously from the
// optimal basis. Deterministic for a fixed problem.
LpSolution solve(const LpProblem& problem);

}  // namespace capmatch
