#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "capmatch/analytics.hpp"
#include "capmatch/instance.hpp"
#include "capmatch/market.hpp"
#include "capmatch/stats.hpp"

namespace capmatch {

inline const std::vector<std::string> kAllPolicies = {"pa-ucb", "pa-ts", "deem", "pa-greedy",
                                                      "deem-plus"};

struct InstanceRecord {
  int id = 0;
  bool usable = true;  // false when generalized imbalance fails
  double v_star = 0.0;
  double regret_constant = 0.0;  // C
  bool dbd01 = false;
  bool dbd04 = false;
  std::map<std::string, double> ratio;  // per policy
};

struct BatchResult {
  std::vector<std::string> policies;
  std::vector<InstanceRecord> records;
  std::uint64_t master_seed = 0;
};

// Generates instances 0..n-1 from (gen, index), analyzes each once, and runs
// every policy with a seed derived from (master seed, instance, policy).
// Parallel across instances; results depend only on indices, not schedule.
BatchResult run_batch(int n_instances, const std::vector<std::string>& policies,
                      std::uint64_t master_seed, const GenConfig& gen, const SimConfig& sim,
                      int n_threads);

std::string batch_to_csv(const BatchResult& batch);
BatchResult batch_from_csv(const std::string& text);

struct PolicySummary {
  std::string policy;
  double mean_ratio = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::vector<double> cdf;  // sorted ratios
};
std::vector<PolicySummary> summarize_batch(const BatchResult& batch);

// Regret-reduction study: sample A holds the 0.1-DBD instances, sample B the
// 0.4-DBD instances that are not 0.1-DBD; the statistic is the percentage
// regret reduction of deem-plus relative to pa-greedy, compared across the
// two samples with a one-tailed Welch test.
struct DbdStudy {
  bool valid = false;
  std::string note;
  std::size_t n_a = 0, n_b = 0;
  double mean_reduction_a = 0.0, mean_reduction_b = 0.0;
  double t_statistic = 0.0;
  double p_one_tailed = 1.0;
};
DbdStudy dbd_study(const BatchResult& batch);

// A three-worker, two-job instance whose plan prices make one worker type
// learnable only through a strictly suboptimal job: exactly one difficult
// ordered pair, C > 0, generalized imbalance holds.
Instance difficult_benchmark_instance();

// Regret scaling probe. For each lifetime the instance is rescaled (same
// rho, mu, A; per-period arrival mass rho/N), simulated with the policy and
// with the omniscient baseline on paired arrival streams, and the mean
// payoff-rate gap is reported, normalized by C log(N) / N.
struct ScalingPoint {
  int lifetime = 0;
  double fluid_regret = 0.0;     // V* - rate/tau
  double baseline_regret = 0.0;  // omniscient rate gap / tau
  double normalized = 0.0;       // baseline_regret * N / (C log N)
};
std::vector<ScalingPoint> scaling_probe(const Instance& base, const std::string& policy_id,
                                        const std::vector<int>& lifetimes, int n_seeds,
                                        const SimConfig& sim, int n_threads);

}  // namespace capmatch
