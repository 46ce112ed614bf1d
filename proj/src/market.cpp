#include "capmatch/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace capmatch {

namespace {

double queue_price(int queue_len, int buffer) {
  return static_cast<double>(buffer - queue_len) / static_cast<double>(buffer);
}

void refresh_structure(MarketState& state, const Instance& inst, const SimConfig& cfg,
                       const Eigen::VectorXd& smoothed) {
  auto sets = tolerant_opt_sets(smoothed, inst, cfg.eps_tol);
  if (state.structure_ready && sets == state.structure_signature) {
    // Signature unchanged: keep the memoized confirmation distributions, but
    // track the drifting smoothed prices in the cheap tables.
    state.structure.max_adjusted.resize(inst.n_worker_types());
    for (int i = 0; i < inst.n_worker_types(); ++i) {
      double best = 0.0;
      for (int j = 0; j < inst.n_job_types(); ++j)
        best = std::max(best, inst.A(i, j) - smoothed(j));
      state.structure.max_adjusted(i) = best;
    }
    state.structure.regret_scale =
        regret_scale_table(state.structure.optimal_jobs, state.structure.strong_from,
                           state.structure.max_adjusted, smoothed, inst);
    return;
  }
  state.structure = build_learning_structure(inst, smoothed, cfg.eps_tol);
  state.structure_signature = std::move(sets);
  state.structure_ready = true;
}

}  // namespace

Eigen::VectorXd instantaneous_prices(const MarketState& state, const SimConfig& cfg) {
  Eigen::VectorXd p(state.queue.size());
  for (int j = 0; j < state.queue.size(); ++j) p(j) = queue_price(state.queue(j), cfg.buffer);
  return p;
}

Eigen::VectorXd smoothed_prices(const MarketState& state, const SimConfig& cfg) {
  Eigen::VectorXd p(state.queue.size());
  for (int j = 0; j < state.queue.size(); ++j) {
    p(j) = state.history[static_cast<std::size_t>(j)].empty()
               ? queue_price(state.queue(j), cfg.buffer)
               : state.history[static_cast<std::size_t>(j)].mean();
  }
  return p;
}

std::vector<std::vector<int>> tolerant_opt_sets(const Eigen::VectorXd& smoothed,
                                                const Instance& inst, double eps) {
  return adjusted_optimal_sets(inst, smoothed, eps);
}

MarketState make_market_state(const Instance& inst, const SimConfig& cfg) {
  MarketState state;
  state.queue = Eigen::VectorXi::Zero(inst.n_job_types());
  state.history.resize(static_cast<std::size_t>(inst.n_job_types()));
  for (auto& h : state.history) h.reset(cfg.price_window);
  state.matches_per_type = Eigen::VectorXd::Zero(inst.n_job_types());
  return state;
}

StepRng make_step_rng(std::uint64_t seed) {
  return StepRng{derive_stream(seed, {1}), derive_stream(seed, {2}), derive_stream(seed, {3}),
                 derive_stream(seed, {4})};
}

double step(MarketState& state, const Instance& inst, const SimConfig& cfg, const Policy& policy,
            StepRng& rng, PeriodTrace* trace) {
  const int nj = inst.n_job_types();
  const long flips = 3L * static_cast<long>(std::llround(cfg.scale));

  Eigen::VectorXd arrived = Eigen::VectorXd::Zero(nj);
  for (int j = 0; j < nj; ++j) {
    const long drawn = rng.arrivals.binomial(flips, std::min(inst.mu(j) / 3.0, 1.0));
    arrived(j) = static_cast<double>(drawn);
    const long room = cfg.buffer - state.queue(j);
    const long accepted = std::min(drawn, room);
    state.jobs_lost += drawn - accepted;
    if (accepted > 0) {
      state.queue(j) += static_cast<int>(accepted);
      state.history[static_cast<std::size_t>(j)].push(queue_price(state.queue(j), cfg.buffer));
    }
  }

  for (int i = 0; i < inst.n_worker_types(); ++i) {
    const int newcomers = static_cast<int>(std::floor(cfg.scale * inst.rho_hat(i)));
    for (int w = 0; w < newcomers; ++w)
      state.roster.push_back(Worker{i, 0, make_belief(inst), make_policy_state(inst)});
  }

  MarketView view;
  view.inst = &inst;
  view.price_now = instantaneous_prices(state, cfg);
  view.price_smooth = smoothed_prices(state, cfg);
  view.lifetime = inst.lifetime;
  view.log_lifetime = std::log(static_cast<double>(inst.lifetime));
  view.exploit_map_tracking = cfg.exploit_map_tracking;
  if (policy.needs_structure()) {
    refresh_structure(state, inst, cfg, view.price_smooth);
    view.structure = &state.structure;
  }

  std::vector<std::uint32_t> order(state.roster.size());
  std::iota(order.begin(), order.end(), 0u);
  rng.order.shuffle(order);

  double period_payoff = 0.0;
  Eigen::VectorXd period_matches = Eigen::VectorXd::Zero(nj);
  Eigen::VectorXd price_epoch_sum = Eigen::VectorXd::Zero(nj);
  Eigen::VectorXd price_epoch_count = Eigen::VectorXd::Zero(nj);

  for (std::uint32_t idx : order) {
    Worker& worker = state.roster[idx];
    const int want =
        policy.decide(DecisionContext{worker.belief, worker.policy_state, worker.true_type},
                      view, rng.policy);
    if (want == inst.kappa()) {
      ++state.kappa_requests;
      continue;
    }
    if (state.queue(want) == 0) {
      ++state.stockouts;
      continue;  // the requested type is final; unmatched workers learn nothing
    }
    state.queue(want) -= 1;
    const double price = queue_price(state.queue(want), cfg.buffer);
    view.price_now(want) = price;
    state.history[static_cast<std::size_t>(want)].push(price);
    price_epoch_sum(want) += price;
    price_epoch_count(want) += 1.0;

    const int outcome = rng.outcomes.bernoulli(inst.A(worker.true_type, want)) ? 1 : 0;
    period_payoff += outcome;
    period_matches(want) += 1.0;
    if (policy.needs_observations()) update(worker.belief, want, outcome, inst);
    policy.record_outcome(worker.policy_state, want, outcome);
  }

  for (auto& worker : state.roster) ++worker.age;
  std::erase_if(state.roster, [&](const Worker& w) { return w.age >= inst.lifetime; });

  state.total_payoff += period_payoff;
  state.matches_per_type += period_matches;
  const int measure_from = cfg.measure_from >= 0 ? cfg.measure_from : inst.lifetime;
  if (state.now >= measure_from) state.measured_payoff += period_payoff;

  if (trace) {
    trace->t = state.now;
    trace->payoff = period_payoff;
    trace->fill_rate = (period_matches.array() / arrived.array().max(1.0)).matrix();
    trace->mean_price =
        (price_epoch_sum.array() / price_epoch_count.array().max(1.0)).matrix();
  }

  state.now += 1;
  return period_payoff;
}

RunMetrics run_simulation(const Instance& inst, const SimConfig& cfg, const Policy& policy,
                          const StaticPlanSolution* plan, std::vector<PeriodTrace>* trace) {
  StaticPlanSolution local_plan;
  if (!plan) {
    local_plan = solve_static_plan(inst);
    plan = &local_plan;
  }
  const int measure_from = cfg.measure_from >= 0 ? cfg.measure_from : inst.lifetime;
  if (measure_from >= cfg.horizon)
    throw std::invalid_argument("run_simulation: measurement window is empty");

  MarketState state = make_market_state(inst, cfg);
  StepRng rng = make_step_rng(cfg.seed);
  if (trace) trace->resize(static_cast<std::size_t>(cfg.horizon));
  for (int t = 0; t < cfg.horizon; ++t)
    step(state, inst, cfg, policy, rng, trace ? &(*trace)[static_cast<std::size_t>(t)] : nullptr);

  RunMetrics m;
  m.total_payoff = state.total_payoff;
  m.rate_full = state.total_payoff / cfg.horizon;
  m.rate_measured = state.measured_payoff / (cfg.horizon - measure_from);
  m.optimal_rate = cfg.scale * plan->value;
  m.ratio = m.rate_measured / m.optimal_rate;
  m.ratio_full = m.rate_full / m.optimal_rate;
  m.jobs_lost = state.jobs_lost;
  m.kappa_requests = state.kappa_requests;
  m.stockouts = state.stockouts;
  return m;
}

}  // namespace capmatch
