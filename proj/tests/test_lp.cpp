#include <doctest.h>

#include <cmath>

#include "capmatch/instance.hpp"
#include "capmatch/lp.hpp"
#include "capmatch/rng.hpp"
#include "support/oracles.hpp"

using namespace capmatch;

namespace {

LpProblem one_var_le() {
  LpProblem p = LpProblem::minimize(Eigen::VectorXd::Constant(1, -1.0));
  p.add_row(Eigen::VectorXd::Constant(1, 1.0), Sense::le, 3.0);
  return p;
}

// Feasible by construction: equality rows pass through a random nonnegative
// point, inequality rows leave it slack, and a box row keeps things bounded.
LpProblem random_problem(SplitMix64& rng) {
  const int n = 2 + static_cast<int>(rng.bounded(5));
  const int m_le = 1 + static_cast<int>(rng.bounded(4));
  const int m_eq = static_cast<int>(rng.bounded(2));

  Eigen::VectorXd witness(n);
  for (int v = 0; v < n; ++v) witness(v) = rng.uniform(0.0, 1.0);

  Eigen::VectorXd c(n);
  for (int v = 0; v < n; ++v) c(v) = rng.uniform(-1.0, 1.0);
  LpProblem p = LpProblem::minimize(c);

  for (int r = 0; r < m_le; ++r) {
    Eigen::VectorXd row(n);
    for (int v = 0; v < n; ++v) row(v) = rng.uniform(-1.0, 1.0);
    p.add_row(row, Sense::le, row.dot(witness) + rng.uniform(0.0, 1.0));
  }
  for (int r = 0; r < m_eq; ++r) {
    Eigen::VectorXd row(n);
    for (int v = 0; v < n; ++v) row(v) = rng.uniform(-1.0, 1.0);
    p.add_row(row, Sense::eq, row.dot(witness));
  }
  p.add_row(Eigen::VectorXd::Ones(n), Sense::le, static_cast<double>(n) + 1.0);
  return p;
}

double dual_objective(const LpProblem& p, const LpSolution& s) {
  double v = 0.0;
  for (int r = 0; r < p.rhs.size(); ++r) {
    switch (p.sense[static_cast<std::size_t>(r)]) {
      case Sense::ge: v += s.dual(r) * p.rhs(r); break;
      case Sense::le: v -= s.dual(r) * p.rhs(r); break;
      case Sense::eq: v -= s.dual(r) * p.rhs(r); break;
    }
  }
  return v;
}

}  // namespace

TEST_CASE("one-variable problems pin the conventions") {
  SUBCASE("binding upper row and its multiplier") {
    const LpSolution s = solve(one_var_le());
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.primal(0) == doctest::Approx(3.0));
    CHECK(s.objective == doctest::Approx(-3.0));
    CHECK(s.dual(0) == doctest::Approx(1.0));
  }
  SUBCASE("contradictory rows are infeasible") {
    LpProblem p = LpProblem::minimize(Eigen::VectorXd::Zero(1));
    p.add_row(Eigen::VectorXd::Constant(1, 1.0), Sense::eq, 1.0);
    p.add_row(Eigen::VectorXd::Constant(1, 1.0), Sense::ge, 2.0);
    CHECK(solve(p).status == LpStatus::infeasible);
  }
  SUBCASE("missing bound is unbounded") {
    LpProblem p = LpProblem::minimize(Eigen::VectorXd::Constant(1, -1.0));
    p.add_row(Eigen::VectorXd::Constant(1, 1.0), Sense::ge, 1.0);
    CHECK(solve(p).status == LpStatus::unbounded);
  }
  SUBCASE("upper bounds act as rows") {
    LpProblem p = LpProblem::minimize(Eigen::VectorXd::Constant(1, -1.0));
    p.upper = Eigen::VectorXd::Constant(1, 2.5);
    const LpSolution s = solve(p);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.primal(0) == doctest::Approx(2.5));
  }
}

TEST_CASE("the known-types plan example has hand duals") {
  // Two worker types, one job with capacity below total supply. The better
  // worker takes the whole capacity; the job price equals its payoff there.
  LpProblem p = LpProblem::minimize([] {
    Eigen::VectorXd c(4);  // x(0,job), x(0,kappa), x(1,job), x(1,kappa)
    c << -0.9, 0.0, -0.5, 0.0;
    return c;
  }());
  Eigen::VectorXd cap(4);
  cap << 1.0, 0.0, 1.0, 0.0;
  p.add_row(cap, Sense::le, 0.8);
  Eigen::VectorXd row0(4), row1(4);
  row0 << 1, 1, 0, 0;
  row1 << 0, 0, 1, 1;
  p.add_row(row0, Sense::eq, 1.0);
  p.add_row(row1, Sense::eq, 1.0);

  const LpSolution s = solve(p);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(-0.72));
  CHECK(s.dual(0) == doctest::Approx(0.9));  // job shadow price

  const auto oracle = oracles::vertex_enumeration(p);
  REQUIRE(oracle.feasible);
  CHECK(oracle.objective == doctest::Approx(s.objective).epsilon(1e-10));
}

TEST_CASE("random problems: duality, slackness, vertex oracle agreement") {
  SplitMix64 rng(20240517);
  int solved = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const LpProblem p = random_problem(rng);
    const LpSolution s = solve(p);
    REQUIRE(s.status == LpStatus::optimal);
    ++solved;

    const double scale = 1.0 + std::abs(s.objective);
    CHECK(std::abs(s.objective - dual_objective(p, s)) <= 1e-8 * scale);

    for (int r = 0; r < p.rhs.size(); ++r) {
      const double lhs = p.constraints.row(r).dot(s.primal);
      switch (p.sense[static_cast<std::size_t>(r)]) {
        case Sense::le:
          CHECK(lhs <= p.rhs(r) + 1e-8);
          CHECK(s.dual(r) >= -1e-8);
          CHECK(std::abs(s.dual(r) * (p.rhs(r) - lhs)) <= 1e-8 * scale);
          break;
        case Sense::ge:
          CHECK(lhs >= p.rhs(r) - 1e-8);
          CHECK(s.dual(r) >= -1e-8);
          CHECK(std::abs(s.dual(r) * (lhs - p.rhs(r))) <= 1e-8 * scale);
          break;
        case Sense::eq:
          CHECK(std::abs(lhs - p.rhs(r)) <= 1e-8);
          break;
      }
    }

    const auto oracle = oracles::vertex_enumeration(p);
    REQUIRE(oracle.feasible);
    CHECK(std::abs(oracle.objective - s.objective) <= 1e-8 * scale);
  }
  CHECK(solved == 1000);
}

TEST_CASE("solver is deterministic") {
  SplitMix64 rng(7);
  const LpProblem p = random_problem(rng);
  const LpSolution a = solve(p);
  const LpSolution b = solve(p);
  CHECK(a.primal == b.primal);
  CHECK(a.dual == b.dual);
}
