#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "capmatch/analytics.hpp"
#include "capmatch/eval.hpp"
#include "capmatch/instance.hpp"
#include "capmatch/market.hpp"
#include "capmatch/policies.hpp"

namespace {

using capmatch::BatchResult;
using capmatch::GenConfig;
using capmatch::Instance;
using capmatch::SimConfig;
using nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jnum(double v) { return json(v); }

json jvec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int k = 0; k < v.size(); ++k) a.push_back(jnum(v(k)));
  return a;
}

json jmat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(jnum(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_file(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> parse_policies(const std::string& arg) {
  if (arg == "all") return capmatch::kAllPolicies;
  std::vector<std::string> out;
  std::istringstream in(arg);
  std::string tok;
  while (std::getline(in, tok, ',')) out.push_back(tok);
  return out;
}

json analyze_report(const Instance& inst) {
  const auto plan = capmatch::solve_static_plan(inst);
  const auto structure = capmatch::build_learning_structure(inst, plan.prices);

  json report;
  report["V_star"] = jnum(plan.value);
  report["p_star"] = jvec(plan.prices.head(inst.n_job_types()));
  report["x_star"] = jmat(plan.routing);
  report["U"] = jvec(structure.max_adjusted);
  report["J_opt"] = structure.optimal_jobs;
  report["Str"] = structure.strong_from;
  json alpha = json::array();
  for (int i = 0; i < inst.n_worker_types(); ++i) {
    if (structure.alpha_defined(i)) {
      alpha.push_back(jvec(structure.alpha.row(i)));
    } else {
      alpha.push_back(nullptr);
    }
  }
  report["alpha"] = std::move(alpha);
  report["C_i"] = jvec(structure.regret_constant);
  report["C"] = jnum(structure.total_constant);
  json pairs = json::array();
  for (const auto& [i, o] : structure.difficult_pairs) pairs.push_back({i, o});
  report["difficult_pairs"] = std::move(pairs);
  report["dbd"] = {{"0.1", capmatch::classify_dbd(structure, inst, 0.1)},
                   {"0.4", capmatch::classify_dbd(structure, inst, 0.4)}};
  return report;
}

std::string trace_to_csv(const std::vector<capmatch::PeriodTrace>& trace, int n_jobs) {
  std::string out = "t,payoff";
  for (int j = 0; j < n_jobs; ++j) out += ",fill_rate_" + std::to_string(j);
  for (int j = 0; j < n_jobs; ++j) out += ",mean_price_" + std::to_string(j);
  out += "\n";
  for (const auto& row : trace) {
    out += std::to_string(row.t) + "," + fmt17(row.payoff);
    for (int j = 0; j < n_jobs; ++j) out += "," + fmt17(row.fill_rate(j));
    for (int j = 0; j < n_jobs; ++j) out += "," + fmt17(row.mean_price(j));
    out += "\n";
  }
  return out;
}

json summary_report(const BatchResult& batch) {
  json report;
  json policies = json::array();
  for (const auto& s : capmatch::summarize_batch(batch)) {
    policies.push_back({{"policy", s.policy},
                        {"mean_ratio", jnum(s.mean_ratio)},
                        {"std_error", jnum(s.std_error)},
                        {"n", s.n},
                        {"cdf", [&] {
                           json pts = json::array();
                           for (double v : s.cdf) pts.push_back(jnum(v));
                           return pts;
                         }()}});
  }
  report["policies"] = std::move(policies);
  const auto study = capmatch::dbd_study(batch);
  report["dbd_study"] = {{"valid", study.valid},
                         {"n_a", study.n_a},
                         {"n_b", study.n_b},
                         {"mean_reduction_a", jnum(study.mean_reduction_a)},
                         {"mean_reduction_b", jnum(study.mean_reduction_b)},
                         {"t_statistic", jnum(study.t_statistic)},
                         {"p_one_tailed", jnum(study.p_one_tailed)}};
  if (!study.note.empty()) report["dbd_study"]["note"] = study.note;
  return report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacity-aware matching policies and marketplace simulator"};
  app.require_subcommand(1);

  const int default_threads =
      std::max(1u, std::thread::hardware_concurrency());

  // generate
  auto* gen_cmd = app.add_subcommand("generate", "Generate a random instance");
  std::uint64_t gen_seed = 0, gen_index = 0;
  std::string gen_out;
  gen_cmd->add_option("--seed", gen_seed, "Master seed");
  gen_cmd->add_option("--index", gen_index, "Instance index within the seed's stream");
  gen_cmd->add_option("--out", gen_out, "Output instance JSON (default stdout)");

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Static plan and learning structure report");
  std::string analyze_instance, analyze_out;
  analyze_cmd->add_option("--instance", analyze_instance, "Instance JSON file")->required();
  analyze_cmd->add_option("--out", analyze_out, "Output report JSON (default stdout)");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Run one marketplace simulation");
  std::string sim_instance, sim_policy = "deem-plus", sim_out, sim_trace;
  SimConfig sim_cfg;
  sim_cmd->add_option("--instance", sim_instance, "Instance JSON file")->required();
  sim_cmd->add_option("--policy", sim_policy,
                      "deem|deem-plus|pa-greedy|pa-ucb|pa-ts|omniscient");
  sim_cmd->add_option("--seed", sim_cfg.seed, "Run seed");
  sim_cmd->add_option("--T", sim_cfg.horizon, "Horizon in periods");
  sim_cmd->add_option("--tau", sim_cfg.scale, "Arrival scale");
  sim_cmd->add_option("--B", sim_cfg.buffer, "Queue buffer capacity");
  sim_cmd->add_option("--W", sim_cfg.price_window, "Price smoothing window");
  sim_cmd->add_option("--eps", sim_cfg.eps_tol, "Optimal-set tolerance on smoothed prices");
  sim_cmd->add_option("--measure-from", sim_cfg.measure_from,
                      "First period of the rate measurement window (default: lifetime)");
  sim_cmd->add_flag("--map-tracking", sim_cfg.exploit_map_tracking,
                    "Exploit the running MAP estimate instead of the confirmed label");
  sim_cmd->add_option("--trace", sim_trace, "Per-period CSV trace output");
  sim_cmd->add_option("--out", sim_out, "Metrics JSON output (default stdout)");

  // batch
  auto* batch_cmd = app.add_subcommand("batch", "Instance batch across policies");
  int batch_n = 100;
  bool batch_full = false;
  std::string batch_policies = "all", batch_out;
  std::uint64_t batch_seed = 0;
  int batch_jobs = default_threads;
  SimConfig batch_cfg;
  batch_cmd->add_option("--n", batch_n, "Number of instances (default 100)");
  batch_cmd->add_flag("--full", batch_full, "Use the full 350-instance batch");
  batch_cmd->add_option("--policies", batch_policies, "Comma list or 'all'");
  batch_cmd->add_option("--seed", batch_seed, "Master seed");
  batch_cmd->add_option("--jobs", batch_jobs, "Worker threads");
  batch_cmd->add_option("--out", batch_out, "Output CSV (default stdout)");
  batch_cmd->add_option("--T", batch_cfg.horizon, "Horizon in periods");
  batch_cmd->add_option("--W", batch_cfg.price_window, "Price smoothing window");
  batch_cmd->add_option("--eps", batch_cfg.eps_tol, "Optimal-set tolerance");

  // report
  auto* report_cmd = app.add_subcommand("report", "Summarize a batch CSV");
  std::string report_csv, report_out;
  report_cmd->add_option("csv", report_csv, "Batch CSV file")->required();
  report_cmd->add_option("--out", report_out, "Summary JSON output (default stdout)");

  // scaling
  auto* scaling_cmd = app.add_subcommand("scaling", "Regret scaling probe on a difficult instance");
  std::string scaling_lifetimes = "30,100,300", scaling_policy = "deem", scaling_instance,
              scaling_out;
  int scaling_seeds = 5, scaling_jobs = default_threads;
  std::uint64_t scaling_seed = 0;
  scaling_cmd->add_option("--N", scaling_lifetimes, "Comma list of worker lifetimes");
  scaling_cmd->add_option("--policy", scaling_policy, "Policy id");
  scaling_cmd->add_option("--instance", scaling_instance,
                          "Instance JSON (default: built-in difficult instance)");
  scaling_cmd->add_option("--seeds", scaling_seeds, "Seeds per lifetime");
  scaling_cmd->add_option("--seed", scaling_seed, "Master seed");
  scaling_cmd->add_option("--jobs", scaling_jobs, "Worker threads");
  scaling_cmd->add_option("--out", scaling_out, "Output JSON (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) {
      const Instance inst = capmatch::generate_instance(GenConfig{gen_seed}, gen_index);
      write_file(gen_out, capmatch::instance_to_json(inst));
    } else if (*analyze_cmd) {
      const Instance inst = capmatch::load_instance(analyze_instance);
      const auto violations = capmatch::validate_instance(inst);
      if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "invalid instance: " << v << "\n";
        return 2;
      }
      write_file(analyze_out, analyze_report(inst).dump(2) + "\n");
    } else if (*sim_cmd) {
      const Instance inst = capmatch::load_instance(sim_instance);
      const auto plan = capmatch::solve_static_plan(inst);
      const auto policy = sim_policy == "omniscient"
                              ? capmatch::make_omniscient_policy(plan.routing)
                              : capmatch::make_policy(sim_policy);
      std::vector<capmatch::PeriodTrace> trace;
      const auto metrics = capmatch::run_simulation(inst, sim_cfg, *policy, &plan,
                                                    sim_trace.empty() ? nullptr : &trace);
      json out;
      out["policy"] = sim_policy;
      out["seed"] = sim_cfg.seed;
      out["total_payoff"] = jnum(metrics.total_payoff);
      out["rate_full"] = jnum(metrics.rate_full);
      out["rate_measured"] = jnum(metrics.rate_measured);
      out["optimal_rate"] = jnum(metrics.optimal_rate);
      out["ratio"] = jnum(metrics.ratio);
      out["ratio_full"] = jnum(metrics.ratio_full);
      out["jobs_lost"] = metrics.jobs_lost;
      out["kappa_requests"] = metrics.kappa_requests;
      out["stockouts"] = metrics.stockouts;
      write_file(sim_out, out.dump(2) + "\n");
      if (!sim_trace.empty()) write_file(sim_trace, trace_to_csv(trace, inst.n_job_types()));
    } else if (*batch_cmd) {
      if (batch_full && !batch_cmd->count("--n")) batch_n = 350;
      const auto batch = capmatch::run_batch(batch_n, parse_policies(batch_policies), batch_seed,
                                             GenConfig{}, batch_cfg, batch_jobs);
      write_file(batch_out, capmatch::batch_to_csv(batch));
    } else if (*report_cmd) {
      const auto batch = capmatch::batch_from_csv(read_file(report_csv));
      write_file(report_out, summary_report(batch).dump(2) + "\n");
    } else if (*scaling_cmd) {
      const Instance inst = scaling_instance.empty()
                                ? capmatch::difficult_benchmark_instance()
                                : capmatch::load_instance(scaling_instance);
      std::vector<int> lifetimes;
      std::istringstream in(scaling_lifetimes);
      std::string tok;
      while (std::getline(in, tok, ',')) lifetimes.push_back(std::stoi(tok));
      SimConfig cfg;
      cfg.seed = scaling_seed;
      const auto points =
          capmatch::scaling_probe(inst, scaling_policy, lifetimes, scaling_seeds, cfg,
                                  scaling_jobs);
      json out = json::array();
      for (const auto& p : points) {
        out.push_back({{"N", p.lifetime},
                       {"fluid_regret", jnum(p.fluid_regret)},
                       {"baseline_regret", jnum(p.baseline_regret)},
                       {"normalized", jnum(p.normalized)}});
      }
      write_file(scaling_out, out.dump(2) + "\n");
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
