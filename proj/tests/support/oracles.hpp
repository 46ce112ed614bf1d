#pragma once

// Brute-force oracles kept independent of the library's solution paths.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "capmatch/lp.hpp"

namespace oracles {

struct VertexOracleResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXd argmin;
};

// Enumerates every basic solution of the constraint system (all equality
// rows active plus each choice of inequality rows and variable bounds) and
// minimizes the objective over the feasible ones. Exponential, fine for a
// handful of variables.
inline VertexOracleResult vertex_enumeration(const capmatch::LpProblem& p) {
  using capmatch::Sense;
  const int n = static_cast<int>(p.objective.size());
  const Eigen::VectorXd lower = p.lower.size() ? p.lower : Eigen::VectorXd::Zero(n);

  struct Hyperplane {
    Eigen::VectorXd a;
    double b;
    bool must_hold;  // equality row
  };
  std::vector<Hyperplane> planes;
  for (int r = 0; r < p.constraints.rows(); ++r)
    planes.push_back({p.constraints.row(r).transpose(), p.rhs(r), p.sense[r] == Sense::eq});
  for (int v = 0; v < n; ++v) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(v) = 1.0;
    planes.push_back({e, lower(v), false});
    if (p.upper.size() && std::isfinite(p.upper(v))) planes.push_back({e, p.upper(v), false});
  }

  const int total = static_cast<int>(planes.size());
  VertexOracleResult best;

  std::vector<int> pick;
  auto feasible = [&](const Eigen::VectorXd& z) {
    constexpr double tol = 1e-7;
    for (int r = 0; r < p.constraints.rows(); ++r) {
      const double lhs = p.constraints.row(r).dot(z);
      if (p.sense[r] == Sense::le && lhs > p.rhs(r) + tol) return false;
      if (p.sense[r] == Sense::ge && lhs < p.rhs(r) - tol) return false;
      if (p.sense[r] == Sense::eq && std::abs(lhs - p.rhs(r)) > tol) return false;
    }
    for (int v = 0; v < n; ++v) {
      if (z(v) < lower(v) - tol) return false;
      if (p.upper.size() && z(v) > p.upper(v) + tol) return false;
    }
    return true;
  };

  auto try_active_set = [&](const std::vector<int>& active) {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd b(n);
    for (int k = 0; k < n; ++k) {
      M.row(k) = planes[static_cast<std::size_t>(active[static_cast<std::size_t>(k)])].a;
      b(k) = planes[static_cast<std::size_t>(active[static_cast<std::size_t>(k)])].b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd z = lu.solve(b);
    if (!feasible(z)) return;
    const double obj = p.objective.dot(z);
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.argmin = z;
    }
  };

  // Every equality row is active by definition; complete the active set with
  // all combinations of the remaining hyperplanes.
  std::vector<int> forced, optional;
  for (int k = 0; k < total; ++k)
    (planes[static_cast<std::size_t>(k)].must_hold ? forced : optional).push_back(k);
  const int need = n - static_cast<int>(forced.size());
  if (need < 0) return best;

  std::vector<int> combo(static_cast<std::size_t>(need));
  auto recurse = [&](auto&& self, int start, int depth) -> void {
    if (depth == need) {
      std::vector<int> active = forced;
      active.insert(active.end(), combo.begin(), combo.end());
      try_active_set(active);
      return;
    }
    for (int k = start; k < static_cast<int>(optional.size()); ++k) {
      combo[static_cast<std::size_t>(depth)] = optional[static_cast<std::size_t>(k)];
      self(self, k + 1, depth + 1);
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

// Minimizer of cost(alpha)/rate(alpha) over a grid on the probability
// simplex, used against the exploration-distribution LPs.
struct SimplexGridResult {
  double objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXd argmin;
};

template <typename Objective>
inline SimplexGridResult simplex_grid_search_2(int steps, Objective&& f) {
  SimplexGridResult best;
  for (int k = 0; k <= steps; ++k) {
    Eigen::VectorXd alpha(2);
    alpha << static_cast<double>(k) / steps, 1.0 - static_cast<double>(k) / steps;
    const double v = f(alpha);
    if (v < best.objective) {
      best.objective = v;
      best.argmin = alpha;
    }
  }
  return best;
}

template <typename Objective>
inline SimplexGridResult simplex_grid_search_3(int steps, Objective&& f) {
  SimplexGridResult best;
  for (int a = 0; a <= steps; ++a) {
    for (int b = 0; b + a <= steps; ++b) {
      Eigen::VectorXd alpha(3);
      alpha << static_cast<double>(a) / steps, static_cast<double>(b) / steps,
          static_cast<double>(steps - a - b) / steps;
      const double v = f(alpha);
      if (v < best.objective) {
        best.objective = v;
        best.argmin = alpha;
      }
    }
  }
  return best;
}

}  // namespace oracles
