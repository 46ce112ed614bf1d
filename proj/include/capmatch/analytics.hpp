#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "capmatch/instance.hpp"
#include "capmatch/lp.hpp"

namespace capmatch {

inline constexpr double kTieTol = 1e-9;       // membership tolerance for optimal job sets
inline constexpr double kKlClamp = 1e-6;      // clamp on the hypothesized success probability
inline constexpr double kAlphaPenalty = 1e-6; // tie-break penalty in the confirmation LPs
inline constexpr double kRegretScaleFloor = 1e-3;

// Solution of the known-types plan: optimal value, routing (with the kappa
// column last), job shadow prices (kappa priced at 0), and worker values.
struct StaticPlanSolution {
  double value = 0.0;
  Eigen::MatrixXd routing;        // nw x (nj + 1)
  Eigen::VectorXd prices;         // nj + 1, last entry 0
  Eigen::VectorXd worker_values;  // nw
};

// Everything the policies consume per worker type, derived from a price
// vector: the maximal adjusted payoff U(i), price-optimal job sets, strong
// distinction sets, the Bernoulli KL table, confirmation distributions with
// their regret constants, difficult pairs, and the misclassification regret
// scale table.
struct LearningStructure {
  Eigen::VectorXd max_adjusted;                  // U(i)
  std::vector<std::vector<int>> optimal_jobs;    // sorted, may contain kappa()
  std::vector<std::vector<int>> strong_from;     // Str(i), sorted
  std::vector<Eigen::MatrixXd> kl;               // kl[j](i, i'), real jobs only
  Eigen::MatrixXd alpha;                         // row i = confirmation distribution, zero if unused
  Eigen::VectorXd regret_constant;               // C(i)
  double total_constant = 0.0;                   // sum_i rho(i) C(i)
  std::vector<std::pair<int, int>> difficult_pairs;
  Eigen::MatrixXd regret_scale;                  // R(i, i'), 1 on the diagonal and off Str

  bool alpha_defined(int i) const { return !strong_from[static_cast<std::size_t>(i)].empty(); }
};

// KL divergence of Bernoulli(q) from Bernoulli(q_hyp), natural log, with
// q_hyp clamped into [kKlClamp, 1 - kKlClamp] so the result stays finite.
double kl_bernoulli(double q, double q_hyp);

// Known-types plan via the dense LP: never infeasible because kappa absorbs
// any unmatched mass.
StaticPlanSolution solve_static_plan(const Instance& inst);

// Jobs within slack of the best price-adjusted payoff for each worker type;
// kappa participates with payoff and price zero.
std::vector<std::vector<int>> adjusted_optimal_sets(const Instance& inst,
                                                    const Eigen::VectorXd& prices,
                                                    double slack);

// Str(i) = { i' != i : optimal_jobs[i] \ optimal_jobs[i'] is nonempty }.
std::vector<std::vector<int>> strong_distinction_sets(
    const std::vector<std::vector<int>>& optimal_jobs);

std::vector<Eigen::MatrixXd> kl_table(const Instance& inst);

// Confirmation distribution for type i and its regret constant C(i): the
// penalized LP over job weights whose KL rate reaches 1 against every type in
// Str(i) at minimal adjusted regret. C(i) is reported from the unpenalized
// objective. Requires Str(i) nonempty.
struct AlphaResult {
  Eigen::VectorXd alpha;  // distribution over real jobs
  double regret_constant = 0.0;
};
AlphaResult compute_alpha(int i, const std::vector<std::vector<int>>& strong_from,
                          const std::vector<Eigen::MatrixXd>& kl,
                          const Eigen::VectorXd& max_adjusted,
                          const Eigen::VectorXd& prices, const Instance& inst);

double compute_C(const Eigen::VectorXd& regret_constant, const Instance& inst);

// Ordered pairs (i, i') with equal payoffs on all of optimal_jobs[i] and
// disjoint optimal job sets.
std::vector<std::pair<int, int>> find_difficult_pairs(
    const std::vector<std::vector<int>>& optimal_jobs, const Instance& inst,
    double tol_eq = kTieTol);

// Highest regret type i' incurs on a job that is optimal for i but not for
// i', clamped into [kRegretScaleFloor, 1]; exactly 1 for i' outside Str(i).
Eigen::MatrixXd regret_scale_table(const std::vector<std::vector<int>>& optimal_jobs,
                                   const std::vector<std::vector<int>>& strong_from,
                                   const Eigen::VectorXd& max_adjusted,
                                   const Eigen::VectorXd& prices, const Instance& inst);

// Full structure for a price vector. `slack` is the tie tolerance for the
// optimal job sets (kTieTol for exact plan prices, the market's epsilon for
// smoothed queue prices).
LearningStructure build_learning_structure(const Instance& inst, const Eigen::VectorXd& prices,
                                           double slack = kTieTol);

// True iff some ordered pair is delta-difficult under the structure's job
// sets while some job still separates it with KL above kl_hi.
bool classify_dbd(const LearningStructure& structure, const Instance& inst, double delta,
                  double kl_hi = 0.5);

}  // namespace capmatch
