#include "capmatch/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace capmatch {

namespace {

bool contains(const std::vector<int>& sorted_set, int v) {
  return std::binary_search(sorted_set.begin(), sorted_set.end(), v);
}

double price_of(const Eigen::VectorXd& prices, int j) {
  return j < prices.size() ? prices(j) : 0.0;
}

}  // namespace

double kl_bernoulli(double q, double q_hyp) {
  const double qc = std::clamp(q_hyp, kKlClamp, 1.0 - kKlClamp);
  double kl = 0.0;
  if (q > 0.0) kl += q * std::log(q / qc);
  if (q < 1.0) kl += (1.0 - q) * std::log((1.0 - q) / (1.0 - qc));
  return std::max(kl, 0.0);
}

StaticPlanSolution solve_static_plan(const Instance& inst) {
  const int nw = inst.n_worker_types();
  const int nj = inst.n_job_types();
  const int cols = nj + 1;  // kappa column included

  // Variables x(i, j) flattened row-major; maximize rho . (A x) as a min LP.
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nw * cols);
  for (int i = 0; i < nw; ++i)
    for (int j = 0; j < nj; ++j) c(i * cols + j) = -inst.rho(i) * inst.A(i, j);

  LpProblem lp = LpProblem::minimize(c);
  lp.constraints = Eigen::MatrixXd::Zero(nj + nw, nw * cols);
  lp.rhs.resize(nj + nw);
  for (int j = 0; j < nj; ++j) {
    for (int i = 0; i < nw; ++i) lp.constraints(j, i * cols + j) = inst.rho(i);
    lp.rhs(j) = inst.mu(j);
    lp.sense.push_back(Sense::le);
  }
  for (int i = 0; i < nw; ++i) {
    lp.constraints.row(nj + i).segment(i * cols, cols).setOnes();
    lp.rhs(nj + i) = 1.0;
    lp.sense.push_back(Sense::eq);
  }

  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::optimal)
    throw std::runtime_error("solve_static_plan: benchmark LP not optimal");

  StaticPlanSolution plan;
  plan.value = -sol.objective;
  plan.routing = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                 Eigen::RowMajor>>(sol.primal.data(), nw, cols);
  plan.prices = Eigen::VectorXd::Zero(nj + 1);
  plan.prices.head(nj) = sol.dual.head(nj).cwiseMax(0.0);
  plan.worker_values.resize(nw);
  for (int i = 0; i < nw; ++i) plan.worker_values(i) = sol.dual(nj + i) / inst.rho(i);
  return plan;
}

std::vector<std::vector<int>> adjusted_optimal_sets(const Instance& inst,
                                                    const Eigen::VectorXd& prices,
                                                    double slack) {
  const int nw = inst.n_worker_types();
  const int nj = inst.n_job_types();
  std::vector<std::vector<int>> sets(nw);
  for (int i = 0; i < nw; ++i) {
    double best = 0.0;  // kappa's adjusted payoff
    for (int j = 0; j < nj; ++j) best = std::max(best, inst.A(i, j) - price_of(prices, j));
    for (int j = 0; j <= nj; ++j)
      if (inst.payoff(i, j) - price_of(prices, j) >= best - slack) sets[i].push_back(j);
  }
  return sets;
}

std::vector<std::vector<int>> strong_distinction_sets(
    const std::vector<std::vector<int>>& optimal_jobs) {
  const int nw = static_cast<int>(optimal_jobs.size());
  std::vector<std::vector<int>> strong(nw);
  for (int i = 0; i < nw; ++i) {
    for (int o = 0; o < nw; ++o) {
      if (o == i) continue;
      const bool escapes = std::any_of(optimal_jobs[i].begin(), optimal_jobs[i].end(),
                                       [&](int j) { return !contains(optimal_jobs[o], j); });
      if (escapes) strong[i].push_back(o);
    }
  }
  return strong;
}

std::vector<Eigen::MatrixXd> kl_table(const Instance& inst) {
  const int nw = inst.n_worker_types();
  std::vector<Eigen::MatrixXd> kl(inst.n_job_types());
  for (int j = 0; j < inst.n_job_types(); ++j) {
    kl[j].resize(nw, nw);
    for (int i = 0; i < nw; ++i)
      for (int o = 0; o < nw; ++o) kl[j](i, o) = kl_bernoulli(inst.A(i, j), inst.A(o, j));
  }
  return kl;
}

AlphaResult compute_alpha(int i, const std::vector<std::vector<int>>& strong_from,
                          const std::vector<Eigen::MatrixXd>& kl,
                          const Eigen::VectorXd& max_adjusted,
                          const Eigen::VectorXd& prices, const Instance& inst) {
  const auto& targets = strong_from[static_cast<std::size_t>(i)];
  if (targets.empty()) throw std::invalid_argument("compute_alpha: Str(i) is empty");
  const int nj = inst.n_job_types();

  // Jobs within the tie tolerance of the optimum are optimal by definition:
  // snapping their regret to exactly zero keeps C(i) = 0 exact whenever a
  // zero-regret support can meet the goals, however much mass it needs.
  Eigen::VectorXd regret(nj);
  for (int j = 0; j < nj; ++j) {
    const double raw = max_adjusted(i) - (inst.A(i, j) - price_of(prices, j));
    regret(j) = raw <= kTieTol ? 0.0 : raw;
  }

  LpProblem rate_goals = LpProblem::minimize(regret);
  rate_goals.constraints.resize(static_cast<int>(targets.size()), nj);
  rate_goals.rhs = Eigen::VectorXd::Ones(static_cast<int>(targets.size()));
  for (std::size_t r = 0; r < targets.size(); ++r) {
    for (int j = 0; j < nj; ++j)
      rate_goals.constraints(static_cast<int>(r), j) = kl[j](i, targets[r]);
    rate_goals.sense.push_back(Sense::ge);
  }

  const LpSolution stage1 = solve(rate_goals);
  if (stage1.status != LpStatus::optimal)
    throw std::runtime_error("compute_alpha: confirmation LP not optimal");
  const double best_cost = std::max(stage1.objective, 0.0);

  // Among the cost minimizers, pick the one with the highest learning rate,
  // i.e. the smallest total weight before normalization.
  LpProblem tie_break = rate_goals;
  tie_break.objective = Eigen::VectorXd::Ones(nj);
  tie_break.add_row(regret, Sense::le, best_cost + kTieTol * (1.0 + best_cost));
  const LpSolution stage2 = solve(tie_break);
  if (stage2.status != LpStatus::optimal)
    throw std::runtime_error("compute_alpha: tie-break LP not optimal");

  const double total = stage2.primal.sum();
  if (!(total > 0.0)) throw std::runtime_error("compute_alpha: degenerate weights");

  AlphaResult out;
  out.alpha = (stage2.primal / total).cwiseMax(0.0);
  out.regret_constant = best_cost;
  return out;
}

double compute_C(const Eigen::VectorXd& regret_constant, const Instance& inst) {
  return inst.rho.dot(regret_constant);
}

std::vector<std::pair<int, int>> find_difficult_pairs(
    const std::vector<std::vector<int>>& optimal_jobs, const Instance& inst, double tol_eq) {
  const int nw = inst.n_worker_types();
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < nw; ++i) {
    for (int o = 0; o < nw; ++o) {
      if (o == i) continue;
      const bool disjoint = std::none_of(optimal_jobs[i].begin(), optimal_jobs[i].end(),
                                         [&](int j) { return contains(optimal_jobs[o], j); });
      if (!disjoint) continue;
      const bool equal_on_set =
          std::all_of(optimal_jobs[i].begin(), optimal_jobs[i].end(), [&](int j) {
            return std::abs(inst.payoff(i, j) - inst.payoff(o, j)) <= tol_eq;
          });
      if (equal_on_set) pairs.emplace_back(i, o);
    }
  }
  return pairs;
}

Eigen::MatrixXd regret_scale_table(const std::vector<std::vector<int>>& optimal_jobs,
                                   const std::vector<std::vector<int>>& strong_from,
                                   const Eigen::VectorXd& max_adjusted,
                                   const Eigen::VectorXd& prices, const Instance& inst) {
  const int nw = inst.n_worker_types();
  Eigen::MatrixXd scale = Eigen::MatrixXd::Ones(nw, nw);
  for (int i = 0; i < nw; ++i) {
    for (int o : strong_from[static_cast<std::size_t>(i)]) {
      double worst = 0.0;
      for (int j : optimal_jobs[i]) {
        if (contains(optimal_jobs[o], j)) continue;
        worst = std::max(worst,
                         max_adjusted(o) - (inst.payoff(o, j) - price_of(prices, j)));
      }
      scale(i, o) = std::clamp(worst, kRegretScaleFloor, 1.0);
    }
  }
  return scale;
}

LearningStructure build_learning_structure(const Instance& inst, const Eigen::VectorXd& prices,
                                           double slack) {
  const int nw = inst.n_worker_types();
  const int nj = inst.n_job_types();

  LearningStructure s;
  s.max_adjusted.resize(nw);
  for (int i = 0; i < nw; ++i) {
    double best = 0.0;
    for (int j = 0; j < nj; ++j) best = std::max(best, inst.A(i, j) - price_of(prices, j));
    s.max_adjusted(i) = best;
  }
  s.optimal_jobs = adjusted_optimal_sets(inst, prices, slack);
  s.strong_from = strong_distinction_sets(s.optimal_jobs);
  s.kl = kl_table(inst);

  s.alpha = Eigen::MatrixXd::Zero(nw, nj);
  s.regret_constant = Eigen::VectorXd::Zero(nw);
  for (int i = 0; i < nw; ++i) {
    if (!s.alpha_defined(i)) continue;
    const AlphaResult res = compute_alpha(i, s.strong_from, s.kl, s.max_adjusted, prices, inst);
    s.alpha.row(i) = res.alpha.transpose();
    s.regret_constant(i) = res.regret_constant;
  }
  s.total_constant = compute_C(s.regret_constant, inst);
  s.difficult_pairs = find_difficult_pairs(s.optimal_jobs, inst);
  s.regret_scale = regret_scale_table(s.optimal_jobs, s.strong_from, s.max_adjusted, prices, inst);
  return s;
}

bool classify_dbd(const LearningStructure& structure, const Instance& inst, double delta,
                  double kl_hi) {
  const int nw = inst.n_worker_types();
  const int nj = inst.n_job_types();
  for (int i = 0; i < nw; ++i) {
    for (int o = 0; o < nw; ++o) {
      if (o == i) continue;
      const auto& ji = structure.optimal_jobs[static_cast<std::size_t>(i)];
      const auto& jo = structure.optimal_jobs[static_cast<std::size_t>(o)];
      const bool disjoint =
          std::none_of(ji.begin(), ji.end(), [&](int j) { return contains(jo, j); });
      if (!disjoint) continue;
      const bool hard_to_tell = std::all_of(ji.begin(), ji.end(), [&](int j) {
        return (j == inst.kappa() ? 0.0 : structure.kl[j](i, o)) < delta;
      });
      if (!hard_to_tell) continue;
      for (int j = 0; j < nj; ++j) {
        if (structure.kl[j](i, o) > kl_hi) return true;
      }
    }
  }
  return false;
}

}  // namespace capmatch
