#pragma once

#include <vector>

#include <Eigen/Dense>

#include "capmatch/analytics.hpp"
#include "capmatch/instance.hpp"

namespace capmatch {

// Per-worker Bayesian state over worker types: accumulated log likelihoods,
// the (log) arrival-rate prior, and elimination flags for types whose
// likelihood hit exact zero. All odds arithmetic stays in log space.
struct WorkerBelief {
  Eigen::VectorXd log_lik;
  Eigen::VectorXd log_prior;
  std::vector<bool> eliminated;
  int jobs_completed = 0;

  int n_types() const { return static_cast<int>(log_lik.size()); }
};

WorkerBelief make_belief(const Instance& inst);

// Fold in one observed (job, outcome) pair. The job must be a real job type:
// kappa produces no observation.
void update(WorkerBelief& belief, int job, int outcome, const Instance& inst);

// log of the posterior odds of type i against type o. +inf when only o is
// eliminated, -inf when only i is, 0 when both are.
double log_odds(const WorkerBelief& belief, int i, int o);

// Maximum a posteriori type among the non-eliminated, lowest index on ties.
int map_estimate(const WorkerBelief& belief);

// Posterior distribution over types; eliminated types get exactly zero.
Eigen::VectorXd posterior(const WorkerBelief& belief);

// Odds rescaled by the misclassification regret scale. For o in Str(i) this
// is odds(i,o)/R(i,o); otherwise it is odds(i,o)/R(i,o) while that value is
// below log(lifetime) and exactly lifetime once it is not. Saturates to +inf
// rather than overflowing.
double capped_odds(const WorkerBelief& belief, int i, int o, const LearningStructure& structure,
                   int lifetime);

}  // namespace capmatch
