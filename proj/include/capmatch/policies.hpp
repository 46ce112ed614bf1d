#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "capmatch/analytics.hpp"
#include "capmatch/belief.hpp"
#include "capmatch/instance.hpp"
#include "capmatch/rng.hpp"

namespace capmatch {

// What a policy sees when deciding: live queue prices, their smoothed
// counterpart, and the learning structure rebuilt from the smoothed prices.
// Prices cover real job types; kappa is implicitly priced at zero.
struct MarketView {
  const Instance* inst = nullptr;
  Eigen::VectorXd price_now;
  Eigen::VectorXd price_smooth;
  const LearningStructure* structure = nullptr;
  int lifetime = 0;
  double log_lifetime = 0.0;
  bool exploit_map_tracking = false;
};

// Per-worker persistent policy data. Exploit is absorbing: once a label is
// set the worker never re-enters exploration.
struct PolicyState {
  enum class Phase { explore, exploit };
  Phase phase = Phase::explore;
  int label = -1;
  Eigen::VectorXd pull_count;  // bandit arm statistics, used by PA-UCB only
  Eigen::VectorXd reward_sum;
  int total_pulls = 0;
};

PolicyState make_policy_state(const Instance& inst);

struct DecisionContext {
  const WorkerBelief& belief;
  PolicyState& state;
  int true_type;  // read only by the omniscient baseline
};

// Price-adjusted argmax over jobs including kappa, lowest index on ties.
int best_adjusted_job(const Instance& inst, int worker_type, const Eigen::VectorXd& prices);

int deem_decide(const WorkerBelief& belief, PolicyState& state, const MarketView& view,
                SplitMix64& rng);
int deem_plus_decide(const WorkerBelief& belief, PolicyState& state, const MarketView& view,
                     SplitMix64& rng);
int pa_greedy_decide(const WorkerBelief& belief, const MarketView& view);
int pa_ucb_decide(const PolicyState& state, const MarketView& view);
int pa_ts_decide(const WorkerBelief& belief, const MarketView& view, SplitMix64& rng);

// Exploration distribution over real jobs that meets the posterior-weighted
// learning goals at minimal expected adjusted regret. `remaining[i]` lists
// the types i still has to be distinguished from. Exposed for testing
// against a brute-force oracle.
Eigen::VectorXd deem_plus_exploration_weights(const Eigen::VectorXd& g,
                                              const std::vector<std::vector<int>>& remaining,
                                              const MarketView& view);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual int decide(DecisionContext ctx, const MarketView& view, SplitMix64& rng) const = 0;
  virtual void record_outcome(PolicyState&, int /*job*/, int /*outcome*/) const {}
  virtual bool needs_structure() const { return false; }
  virtual bool needs_observations() const { return true; }
  virtual const char* name() const = 0;
};

// Known ids: deem, deem-plus, pa-greedy, pa-ucb, pa-ts. The omniscient
// baseline routes by the known-types plan and is available as "omniscient"
// given the plan routing.
std::unique_ptr<Policy> make_policy(std::string_view id);
std::unique_ptr<Policy> make_omniscient_policy(Eigen::MatrixXd routing);

}  // namespace capmatch
