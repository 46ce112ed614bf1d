#include "capmatch/policies.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "capmatch/lp.hpp"

namespace capmatch {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PolicyState make_policy_state(const Instance& inst) {
  PolicyState s;
  s.pull_count = Eigen::VectorXd::Zero(inst.n_job_types());
  s.reward_sum = Eigen::VectorXd::Zero(inst.n_job_types());
  return s;
}

int best_adjusted_job(const Instance& inst, int worker_type, const Eigen::VectorXd& prices) {
  int best = 0;
  double best_value = inst.A(worker_type, 0) - prices(0);
  for (int j = 1; j <= inst.n_job_types(); ++j) {
    const double value =
        j == inst.kappa() ? 0.0 : inst.A(worker_type, j) - prices(j);
    if (value > best_value) {
      best = j;
      best_value = value;
    }
  }
  return best;
}

namespace {

int exploit_choice(const PolicyState& state, const WorkerBelief& belief, const MarketView& view) {
  const int type = view.exploit_map_tracking ? map_estimate(belief) : state.label;
  return best_adjusted_job(*view.inst, type, view.price_now);
}

// min over o != i (optionally restricted to Str(i)) of the posterior log odds.
double min_log_odds(const WorkerBelief& belief, int i, const std::vector<int>* restrict_to) {
  double lo = kInf;
  if (restrict_to) {
    for (int o : *restrict_to) lo = std::min(lo, log_odds(belief, i, o));
  } else {
    for (int o = 0; o < belief.n_types(); ++o)
      if (o != i) lo = std::min(lo, log_odds(belief, i, o));
  }
  return lo;
}

}  // namespace

int deem_decide(const WorkerBelief& belief, PolicyState& state, const MarketView& view,
                SplitMix64& rng) {
  if (state.phase == PolicyState::Phase::exploit) return exploit_choice(state, belief, view);

  const int map = map_estimate(belief);
  const double guess_gate = min_log_odds(belief, map, nullptr);
  if (guess_gate < std::log(view.log_lifetime))
    return static_cast<int>(rng.bounded(view.inst->n_job_types()));

  const auto& strong = view.structure->strong_from[static_cast<std::size_t>(map)];
  const double confirm_gate = min_log_odds(belief, map, &strong);
  if (confirm_gate < view.log_lifetime) {
    return rng.sample_discrete(view.structure->alpha.row(map));
  }

  state.phase = PolicyState::Phase::exploit;
  state.label = map;
  return exploit_choice(state, belief, view);
}

Eigen::VectorXd deem_plus_exploration_weights(const Eigen::VectorXd& g,
                                              const std::vector<std::vector<int>>& remaining,
                                              const MarketView& view) {
  const Instance& inst = *view.inst;
  const LearningStructure& s = *view.structure;
  const int nw = inst.n_worker_types();
  const int nj = inst.n_job_types();

  Eigen::MatrixXd regret(nw, nj);
  for (int i = 0; i < nw; ++i)
    for (int j = 0; j < nj; ++j)
      regret(i, j) = s.max_adjusted(i) - (inst.A(i, j) - view.price_smooth(j));

  LpProblem lp = LpProblem::minimize(
      Eigen::VectorXd((regret.transpose() * g).array() + kAlphaPenalty));
  for (int i = 0; i < nw; ++i) {
    if (!(g(i) > 0.0)) continue;
    for (int o : remaining[static_cast<std::size_t>(i)]) {
      // The learning goal is discounted by the posterior weight of i and by
      // the regret scale of confusing o for i; nonpositive goals are vacuous.
      const double goal = g(i) * (1.0 + std::log(s.regret_scale(i, o)) / view.log_lifetime);
      if (goal <= 0.0) continue;
      Eigen::VectorXd row(nj);
      for (int j = 0; j < nj; ++j) row(j) = s.kl[j](i, o);
      lp.add_row(row, Sense::ge, goal);
    }
  }

  const LpSolution sol = solve(lp);
  if (sol.status != LpStatus::optimal)
    throw std::runtime_error("deem_plus exploration LP not optimal");

  if (sol.primal.sum() <= 1e-12) {
    // Every goal is already met in the rescaled sense; play the
    // posterior-weighted myopic job, the limit of the LP as goals vanish.
    Eigen::VectorXd point = Eigen::VectorXd::Zero(nj);
    Eigen::VectorXd cost = regret.transpose() * g;
    int best = 0;
    for (int j = 1; j < nj; ++j)
      if (cost(j) < cost(best)) best = j;
    point(best) = 1.0;
    return point;
  }
  return sol.primal / sol.primal.sum();
}

int deem_plus_decide(const WorkerBelief& belief, PolicyState& state, const MarketView& view,
                     SplitMix64& rng) {
  if (state.phase == PolicyState::Phase::exploit) return exploit_choice(state, belief, view);

  const LearningStructure& s = *view.structure;
  const int nw = belief.n_types();
  const double n_gate = static_cast<double>(view.lifetime);

  std::vector<std::vector<int>> remaining(static_cast<std::size_t>(nw));
  for (int i = 0; i < nw; ++i) {
    for (int o = 0; o < nw; ++o) {
      if (o == i) continue;
      if (capped_odds(belief, i, o, s, view.lifetime) < n_gate)
        remaining[static_cast<std::size_t>(i)].push_back(o);
    }
    if (remaining[static_cast<std::size_t>(i)].empty()) {
      state.phase = PolicyState::Phase::exploit;
      state.label = i;
      return exploit_choice(state, belief, view);
    }
  }

  return rng.sample_discrete(deem_plus_exploration_weights(posterior(belief), remaining, view));
}

int pa_greedy_decide(const WorkerBelief& belief, const MarketView& view) {
  return best_adjusted_job(*view.inst, map_estimate(belief), view.price_now);
}

int pa_ucb_decide(const PolicyState& state, const MarketView& view) {
  const int nj = view.inst->n_job_types();
  for (int j = 0; j < nj; ++j)
    if (state.pull_count(j) == 0.0) return j;

  int best = 0;
  double best_value = -kInf;
  for (int j = 0; j < nj; ++j) {
    const double mean = state.reward_sum(j) / state.pull_count(j);
    const double bonus =
        std::sqrt(2.0 * std::log(static_cast<double>(state.total_pulls)) / state.pull_count(j));
    const double value = mean + bonus - view.price_now(j);
    if (value > best_value) {
      best = j;
      best_value = value;
    }
  }
  return best;
}

int pa_ts_decide(const WorkerBelief& belief, const MarketView& view, SplitMix64& rng) {
  const int sampled = rng.sample_discrete(posterior(belief));
  return best_adjusted_job(*view.inst, sampled, view.price_now);
}

namespace {

class DeemPolicy final : public Policy {
 public:
  int decide(DecisionContext ctx, const MarketView& view, SplitMix64& rng) const override {
    return deem_decide(ctx.belief, ctx.state, view, rng);
  }
  bool needs_structure() const override { return true; }
  const char* name() const override { return "deem"; }
};

class DeemPlusPolicy final : public Policy {
 public:
  int decide(DecisionContext ctx, const MarketView& view, SplitMix64& rng) const override {
    return deem_plus_decide(ctx.belief, ctx.state, view, rng);
  }
  bool needs_structure() const override { return true; }
  const char* name() const override { return "deem-plus"; }
};

class PaGreedyPolicy final : public Policy {
 public:
  int decide(DecisionContext ctx, const MarketView& view, SplitMix64&) const override {
    return pa_greedy_decide(ctx.belief, view);
  }
  const char* name() const override { return "pa-greedy"; }
};

class PaUcbPolicy final : public Policy {
 public:
  int decide(DecisionContext ctx, const MarketView& view, SplitMix64&) const override {
    return pa_ucb_decide(ctx.state, view);
  }
  void record_outcome(PolicyState& state, int job, int outcome) const override {
    state.pull_count(job) += 1.0;
    state.reward_sum(job) += outcome;
    state.total_pulls += 1;
  }
  bool needs_observations() const override { return false; }
  const char* name() const override { return "pa-ucb"; }
};

class PaTsPolicy final : public Policy {
 public:
  int decide(DecisionContext ctx, const MarketView& view, SplitMix64& rng) const override {
    return pa_ts_decide(ctx.belief, view, rng);
  }
  const char* name() const override { return "pa-ts"; }
};

class OmniscientPolicy final : public Policy {
 public:
  explicit OmniscientPolicy(Eigen::MatrixXd routing) : routing_(std::move(routing)) {}
  int decide(DecisionContext ctx, const MarketView&, SplitMix64& rng) const override {
    return rng.sample_discrete(routing_.row(ctx.true_type));
  }
  bool needs_observations() const override { return false; }
  const char* name() const override { return "omniscient"; }

 private:
  Eigen::MatrixXd routing_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(std::string_view id) {
  if (id == "deem") return std::make_unique<DeemPolicy>();
  if (id == "deem-plus") return std::make_unique<DeemPlusPolicy>();
  if (id == "pa-greedy") return std::make_unique<PaGreedyPolicy>();
  if (id == "pa-ucb") return std::make_unique<PaUcbPolicy>();
  if (id == "pa-ts") return std::make_unique<PaTsPolicy>();
  throw std::invalid_argument("unknown policy id: " + std::string(id));
}

std::unique_ptr<Policy> make_omniscient_policy(Eigen::MatrixXd routing) {
  return std::make_unique<OmniscientPolicy>(std::move(routing));
}

}  // namespace capmatch
