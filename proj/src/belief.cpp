#include "capmatch/belief.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace capmatch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_strong_set(const LearningStructure& structure, int i, int o) {
  const auto& str = structure.strong_from[static_cast<std::size_t>(i)];
  return std::binary_search(str.begin(), str.end(), o);
}
}  // namespace

WorkerBelief make_belief(const Instance& inst) {
  WorkerBelief b;
  b.log_lik = Eigen::VectorXd::Zero(inst.n_worker_types());
  b.log_prior.resize(inst.n_worker_types());
  for (int i = 0; i < inst.n_worker_types(); ++i) b.log_prior(i) = std::log(inst.rho_hat(i));
  b.eliminated.assign(inst.n_worker_types(), false);
  return b;
}

void update(WorkerBelief& belief, int job, int outcome, const Instance& inst) {
  if (job < 0 || job >= inst.n_job_types())
    throw std::invalid_argument("belief update: kappa or out-of-range job");
  for (int i = 0; i < belief.n_types(); ++i) {
    if (belief.eliminated[i]) continue;
    const double lik = outcome ? inst.A(i, job) : 1.0 - inst.A(i, job);
    if (lik <= 0.0) {
      belief.eliminated[i] = true;
      belief.log_lik(i) = -kInf;
    } else {
      belief.log_lik(i) += std::log(lik);
    }
  }
  ++belief.jobs_completed;
}

double log_odds(const WorkerBelief& belief, int i, int o) {
  const bool dead_i = belief.eliminated[static_cast<std::size_t>(i)];
  const bool dead_o = belief.eliminated[static_cast<std::size_t>(o)];
  if (dead_i && dead_o) return 0.0;
  if (dead_i) return -kInf;
  if (dead_o) return kInf;
  return belief.log_prior(i) + belief.log_lik(i) - belief.log_prior(o) - belief.log_lik(o);
}

int map_estimate(const WorkerBelief& belief) {
  int best = -1;
  double best_score = -kInf;
  for (int i = 0; i < belief.n_types(); ++i) {
    if (belief.eliminated[i]) continue;
    const double score = belief.log_prior(i) + belief.log_lik(i);
    if (best < 0 || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

Eigen::VectorXd posterior(const WorkerBelief& belief) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(belief.n_types());
  double top = -kInf;
  for (int i = 0; i < belief.n_types(); ++i)
    if (!belief.eliminated[i]) top = std::max(top, belief.log_prior(i) + belief.log_lik(i));
  double total = 0.0;
  for (int i = 0; i < belief.n_types(); ++i) {
    if (belief.eliminated[i]) continue;
    g(i) = std::exp(belief.log_prior(i) + belief.log_lik(i) - top);
    total += g(i);
  }
  g /= total;
  return g;
}

double capped_odds(const WorkerBelief& belief, int i, int o, const LearningStructure& structure,
                   int lifetime) {
  const double log_scaled = log_odds(belief, i, o) - std::log(structure.regret_scale(i, o));
  const double scaled = std::exp(log_scaled);
  if (in_strong_set(structure, i, o)) return scaled;
  return scaled < std::log(static_cast<double>(lifetime)) ? scaled
                                                          : static_cast<double>(lifetime);
}

}  // namespace capmatch
