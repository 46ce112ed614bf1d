#include "capmatch/eval.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "capmatch/policies.hpp"

namespace capmatch {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t policy_stream_id(const std::string& policy) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : policy) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

void parallel_for(int n, int n_threads, const std::function<void(int)>& body) {
  if (n_threads <= 1) {
    for (int k = 0; k < n; ++k) body(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(n_threads, n);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) body(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

BatchResult run_batch(int n_instances, const std::vector<std::string>& policies,
                      std::uint64_t master_seed, const GenConfig& gen, const SimConfig& sim,
                      int n_threads) {
  if (n_instances < 1) throw std::invalid_argument("run_batch: need at least one instance");
  BatchResult batch;
  batch.policies = policies;
  batch.master_seed = master_seed;
  batch.records.resize(static_cast<std::size_t>(n_instances));

  GenConfig gen_cfg = gen;
  gen_cfg.seed = master_seed;

  parallel_for(n_instances, n_threads, [&](int k) {
    InstanceRecord& rec = batch.records[static_cast<std::size_t>(k)];
    rec.id = k;
    const Instance inst = generate_instance(gen_cfg, static_cast<std::uint64_t>(k));
    if (!check_generalized_imbalance(inst)) {
      rec.usable = false;
      return;
    }
    const StaticPlanSolution plan = solve_static_plan(inst);
    const LearningStructure structure = build_learning_structure(inst, plan.prices);
    rec.v_star = plan.value;
    rec.regret_constant = structure.total_constant;
    rec.dbd01 = classify_dbd(structure, inst, 0.1);
    rec.dbd04 = classify_dbd(structure, inst, 0.4);

    for (const auto& id : policies) {
      const auto policy = id == "omniscient" ? make_omniscient_policy(plan.routing)
                                             : make_policy(id);
      SimConfig run_cfg = sim;
      run_cfg.seed = derive_stream(master_seed, {static_cast<std::uint64_t>(k),
                                                 policy_stream_id(id)})
                         .next();
      const RunMetrics m = run_simulation(inst, run_cfg, *policy, &plan);
      rec.ratio[id] = m.ratio;
    }
  });
  return batch;
}

std::string batch_to_csv(const BatchResult& batch) {
  std::string out = "instance_id,policy,ratio,V_star,C,dbd01,dbd04\n";
  for (const auto& rec : batch.records) {
    if (!rec.usable) continue;
    for (const auto& policy : batch.policies) {
      out += std::to_string(rec.id) + "," + policy + "," +
             format_double(rec.ratio.at(policy)) + "," + format_double(rec.v_star) + "," +
             format_double(rec.regret_constant) + "," + (rec.dbd01 ? "1" : "0") + "," +
             (rec.dbd04 ? "1" : "0") + "\n";
    }
  }
  return out;
}

BatchResult batch_from_csv(const std::string& text) {
  BatchResult batch;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("batch CSV: empty");
  std::map<int, std::size_t> row_of;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw std::invalid_argument("batch CSV: malformed row: " + line);
    const int id = std::stoi(fields[0]);
    auto [it, fresh] = row_of.try_emplace(id, batch.records.size());
    if (fresh) {
      batch.records.emplace_back();
      batch.records.back().id = id;
    }
    InstanceRecord& rec = batch.records[it->second];
    rec.ratio[fields[1]] = std::stod(fields[2]);
    rec.v_star = std::stod(fields[3]);
    rec.regret_constant = std::stod(fields[4]);
    rec.dbd01 = fields[5] == "1";
    rec.dbd04 = fields[6] == "1";
    bool known = false;
    for (const auto& p : batch.policies) known = known || p == fields[1];
    if (!known) batch.policies.push_back(fields[1]);
  }
  return batch;
}

std::vector<PolicySummary> summarize_batch(const BatchResult& batch) {
  std::vector<PolicySummary> out;
  for (const auto& policy : batch.policies) {
    PolicySummary s;
    s.policy = policy;
    std::vector<double> ratios;
    for (const auto& rec : batch.records) {
      if (!rec.usable) continue;
      const auto it = rec.ratio.find(policy);
      if (it != rec.ratio.end()) ratios.push_back(it->second);
    }
    s.n = ratios.size();
    if (!ratios.empty()) s.mean_ratio = mean(ratios);
    if (ratios.size() > 1) s.std_error = standard_error(ratios);
    s.cdf = ecdf_points(ratios);
    out.push_back(std::move(s));
  }
  return out;
}

DbdStudy dbd_study(const BatchResult& batch) {
  DbdStudy study;
  std::vector<double> reductions_a, reductions_b;
  for (const auto& rec : batch.records) {
    if (!rec.usable) continue;
    const auto greedy = rec.ratio.find("pa-greedy");
    const auto plus = rec.ratio.find("deem-plus");
    if (greedy == rec.ratio.end() || plus == rec.ratio.end()) continue;
    const double regret_greedy = 1.0 - greedy->second;
    const double regret_plus = 1.0 - plus->second;
    if (regret_greedy <= 0.0) continue;
    const double reduction = 100.0 * (regret_greedy - regret_plus) / regret_greedy;
    if (rec.dbd01) {
      reductions_a.push_back(reduction);
    } else if (rec.dbd04) {
      reductions_b.push_back(reduction);
    }
  }
  study.n_a = reductions_a.size();
  study.n_b = reductions_b.size();
  if (reductions_a.size() < 2 || reductions_b.size() < 2) {
    study.note = "degenerate sample; study skipped";
    return study;
  }
  const WelchResult w = welch_one_tailed(reductions_a, reductions_b);
  study.valid = true;
  study.mean_reduction_a = w.mean_a;
  study.mean_reduction_b = w.mean_b;
  study.t_statistic = w.t_statistic;
  study.p_one_tailed = w.p_one_tailed;
  return study;
}

Instance difficult_benchmark_instance() {
  Instance inst;
  inst.rho = Eigen::VectorXd::Ones(3);
  inst.mu.resize(2);
  inst.mu << 2.2, 1.4;
  inst.A.resize(3, 2);
  // Worker 0 pays the same on both jobs, so only the scarce second job can
  // reveal whether it is worker 1; worker 2 pins the second job's price
  // strictly between the ties.
  inst.A << 0.5, 0.5,
            0.5, 0.9,
            0.4, 0.7;
  inst.lifetime = 30;
  return inst;
}

std::vector<ScalingPoint> scaling_probe(const Instance& base, const std::string& policy_id,
                                        const std::vector<int>& lifetimes, int n_seeds,
                                        const SimConfig& sim, int n_threads) {
  Instance probe_check = base;
  const StaticPlanSolution base_plan = solve_static_plan(probe_check);
  const LearningStructure base_structure = build_learning_structure(probe_check, base_plan.prices);
  if (!(base_structure.total_constant > 0.0))
    throw std::invalid_argument("scaling_probe: instance has no difficult pair (C == 0)");
  const double C = base_structure.total_constant;

  struct Task {
    int n_index;
    int seed_index;
  };
  std::vector<Task> tasks;
  for (int ni = 0; ni < static_cast<int>(lifetimes.size()); ++ni)
    for (int s = 0; s < n_seeds; ++s) tasks.push_back({ni, s});

  std::vector<std::vector<double>> policy_rates(lifetimes.size(),
                                                std::vector<double>(n_seeds, 0.0));
  auto baseline_rates = policy_rates;

  parallel_for(static_cast<int>(tasks.size()), n_threads, [&](int t) {
    const Task task = tasks[static_cast<std::size_t>(t)];
    Instance inst = base;
    inst.lifetime = lifetimes[static_cast<std::size_t>(task.n_index)];
    const StaticPlanSolution plan = solve_static_plan(inst);

    SimConfig cfg = sim;
    cfg.horizon = std::max(sim.horizon, 5 * inst.lifetime);
    cfg.measure_from = 2 * inst.lifetime;
    cfg.seed = derive_stream(sim.seed, {static_cast<std::uint64_t>(task.n_index),
                                        static_cast<std::uint64_t>(task.seed_index)})
                   .next();

    const auto policy = make_policy(policy_id);
    const auto oracle = make_omniscient_policy(plan.routing);
    const RunMetrics run = run_simulation(inst, cfg, *policy, &plan);
    const RunMetrics ref = run_simulation(inst, cfg, *oracle, &plan);
    policy_rates[task.n_index][task.seed_index] = run.rate_measured;
    baseline_rates[task.n_index][task.seed_index] = ref.rate_measured;
  });

  std::vector<ScalingPoint> points;
  for (std::size_t ni = 0; ni < lifetimes.size(); ++ni) {
    ScalingPoint p;
    p.lifetime = lifetimes[ni];
    const double rate = mean(policy_rates[ni]);
    const double ref_rate = mean(baseline_rates[ni]);
    p.fluid_regret = base_plan.value - rate / sim.scale;
    p.baseline_regret = (ref_rate - rate) / sim.scale;
    p.normalized = p.baseline_regret * p.lifetime / (C * std::log(p.lifetime));
    points.push_back(p);
  }
  return points;
}

}  // namespace capmatch
