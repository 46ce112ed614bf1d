#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "capmatch/analytics.hpp"
#include "capmatch/belief.hpp"
#include "capmatch/instance.hpp"
#include "capmatch/policies.hpp"
#include "capmatch/rng.hpp"

namespace capmatch {

struct SimConfig {
  int horizon = 150;          // periods simulated
  double scale = 900.0;       // arrival scale tau
  int buffer = 10000;         // queue capacity B per job type
  int price_window = 200;     // smoothing window in price-change epochs
  double eps_tol = 0.05;      // tolerance for the smoothed-price optimal sets
  std::uint64_t seed = 0;
  bool exploit_map_tracking = false;
  bool cascade_on_stockout = false;  // reserved knob; requests are final by default
  // Payoff-rate measurement starts here so the roster ramp-up and price
  // settling do not dilute the steady-state rate; -1 means the worker
  // lifetime. The full-horizon rate is reported alongside.
  int measure_from = -1;
};

// Fixed-capacity ring of the most recent price-change epochs for one type.
class PriceHistory {
 public:
  void reset(int capacity) {
    values_.assign(static_cast<std::size_t>(capacity), 0.0);
    head_ = count_ = 0;
    sum_ = 0.0;
  }
  void push(double v) {
    if (count_ == values_.size()) {
      sum_ -= values_[head_];
    } else {
      ++count_;
    }
    sum_ += v;
    values_[head_] = v;
    head_ = (head_ + 1) % values_.size();
  }
  bool empty() const { return count_ == 0; }
  double mean() const { return sum_ / static_cast<double>(count_); }

 private:
  std::vector<double> values_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  double sum_ = 0.0;
};

struct Worker {
  int true_type = 0;
  int age = 0;
  WorkerBelief belief;
  PolicyState policy_state;
};

struct PeriodTrace {
  int t = 0;
  double payoff = 0.0;
  Eigen::VectorXd fill_rate;   // matched / arrived this period, per type
  Eigen::VectorXd mean_price;  // mean of this period's price epochs, per type
};

struct MarketState {
  int now = 0;
  Eigen::VectorXi queue;
  std::vector<PriceHistory> history;
  std::vector<Worker> roster;
  double total_payoff = 0.0;
  double measured_payoff = 0.0;
  long jobs_lost = 0;
  long kappa_requests = 0;
  long stockouts = 0;
  Eigen::VectorXd matches_per_type;

  // Learning structure derived from smoothed prices, refreshed per period
  // and rebuilt only when the optimal-set signature changes.
  LearningStructure structure;
  std::vector<std::vector<int>> structure_signature;
  bool structure_ready = false;
};

struct RunMetrics {
  double total_payoff = 0.0;
  double rate_full = 0.0;      // total / horizon
  double rate_measured = 0.0;  // payoff per period over the measured window
  double optimal_rate = 0.0;   // tau * V*
  double ratio = 0.0;          // rate_measured / optimal_rate
  double ratio_full = 0.0;     // rate_full / optimal_rate
  long jobs_lost = 0;
  long kappa_requests = 0;
  long stockouts = 0;
};

Eigen::VectorXd instantaneous_prices(const MarketState& state, const SimConfig& cfg);

// Mean of the recorded price epochs per type; with no history yet, the
// current instantaneous price.
Eigen::VectorXd smoothed_prices(const MarketState& state, const SimConfig& cfg);

// Jobs within eps of the best smoothed-price-adjusted payoff, kappa included.
std::vector<std::vector<int>> tolerant_opt_sets(const Eigen::VectorXd& smoothed,
                                                const Instance& inst, double eps);

MarketState make_market_state(const Instance& inst, const SimConfig& cfg);

struct StepRng {
  SplitMix64 arrivals;
  SplitMix64 order;
  SplitMix64 outcomes;
  SplitMix64 policy;
};
StepRng make_step_rng(std::uint64_t seed);

// One period: job arrivals into the buffered queues, worker arrivals,
// policy-driven matching over a random visiting order, payoff realization,
// belief updates, and retirement of expired workers.
double step(MarketState& state, const Instance& inst, const SimConfig& cfg, const Policy& policy,
            StepRng& rng, PeriodTrace* trace = nullptr);

RunMetrics run_simulation(const Instance& inst, const SimConfig& cfg, const Policy& policy,
                          const StaticPlanSolution* plan = nullptr,
                          std::vector<PeriodTrace>* trace = nullptr);

}  // namespace capmatch
