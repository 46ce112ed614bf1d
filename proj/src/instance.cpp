#include "capmatch/instance.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace capmatch {

namespace {

bool has_duplicate_rows(const Eigen::MatrixXd& A) {
  for (int a = 0; a < A.rows(); ++a)
    for (int b = a + 1; b < A.rows(); ++b)
      if (A.row(a) == A.row(b)) return true;
  return false;
}

void append_double(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

Instance generate_instance(const GenConfig& cfg, std::uint64_t index) {
  if (cfg.n_worker_types < 1 || cfg.n_job_types < 1 || cfg.lifetime < 1 ||
      !(cfg.mu_low < cfg.mu_high) || !(cfg.rho_all > 0.0)) {
    throw std::invalid_argument("generate_instance: invalid GenConfig");
  }
  SplitMix64 rng = derive_stream(cfg.seed, {index});

  Instance inst;
  inst.lifetime = cfg.lifetime;
  inst.rho = Eigen::VectorXd::Constant(cfg.n_worker_types, cfg.rho_all);
  inst.mu.resize(cfg.n_job_types);
  for (int j = 0; j < cfg.n_job_types; ++j) inst.mu(j) = rng.uniform(cfg.mu_low, cfg.mu_high);

  inst.A.resize(cfg.n_worker_types, cfg.n_job_types);
  do {
    for (int i = 0; i < cfg.n_worker_types; ++i)
      for (int j = 0; j < cfg.n_job_types; ++j) inst.A(i, j) = rng.next_double();
  } while (has_duplicate_rows(inst.A));

  return inst;
}

std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> violations;
  if (inst.rho.size() < 1) violations.push_back("no worker types");
  if (inst.mu.size() < 1) violations.push_back("no job types");
  if (inst.lifetime < 1) violations.push_back("nonpositive lifetime");
  if (inst.A.rows() != inst.rho.size() || inst.A.cols() != inst.mu.size())
    violations.push_back("payoff matrix shape mismatch");
  if ((inst.rho.array() <= 0.0).any() || !inst.rho.allFinite())
    violations.push_back("nonpositive rho");
  if ((inst.mu.array() <= 0.0).any() || !inst.mu.allFinite())
    violations.push_back("nonpositive mu");
  if (!inst.A.allFinite() || (inst.A.array() < 0.0).any() || (inst.A.array() > 1.0).any())
    violations.push_back("payoff entries outside [0,1]");
  if (inst.A.rows() == inst.rho.size() && inst.A.cols() == inst.mu.size() &&
      inst.A.allFinite() && has_duplicate_rows(inst.A))
    violations.push_back("duplicate A rows");
  return violations;
}

bool check_generalized_imbalance(const Instance& inst, double tol) {
  const int nw = inst.n_worker_types();
  const int nj = inst.n_job_types();
  if (nw > 24 || nj > 24) throw std::invalid_argument("generalized imbalance check: too many types");

  std::vector<double> worker_sums(std::size_t{1} << nw, 0.0);
  for (std::size_t mask = 1; mask < worker_sums.size(); ++mask) {
    const int low = std::countr_zero(mask);
    worker_sums[mask] = worker_sums[mask & (mask - 1)] + inst.rho(low);
  }
  std::vector<double> job_sums(std::size_t{1} << nj, 0.0);
  for (std::size_t mask = 1; mask < job_sums.size(); ++mask) {
    const int low = std::countr_zero(mask);
    job_sums[mask] = job_sums[mask & (mask - 1)] + inst.mu(low);
  }

  for (std::size_t wm = 1; wm < worker_sums.size(); ++wm)
    for (std::size_t jm = 0; jm < job_sums.size(); ++jm)
      if (std::abs(worker_sums[wm] - job_sums[jm]) <= tol) return false;
  return true;
}

std::string instance_to_json(const Instance& inst) {
  std::string out = "{\n  \"rho\": [";
  for (int i = 0; i < inst.rho.size(); ++i) {
    if (i) out += ", ";
    append_double(out, inst.rho(i));
  }
  out += "],\n  \"mu\": [";
  for (int j = 0; j < inst.mu.size(); ++j) {
    if (j) out += ", ";
    append_double(out, inst.mu(j));
  }
  out += "],\n  \"A\": [";
  for (int i = 0; i < inst.A.rows(); ++i) {
    out += i ? ",\n        [" : "[";
    for (int j = 0; j < inst.A.cols(); ++j) {
      if (j) out += ", ";
      append_double(out, inst.A(i, j));
    }
    out += "]";
  }
  out += "],\n  \"N\": " + std::to_string(inst.lifetime) + "\n}\n";
  return out;
}

Instance instance_from_json(const std::string& text) {
  const nlohmann::json doc = nlohmann::json::parse(text);
  Instance inst;
  const auto& rho = doc.at("rho");
  const auto& mu = doc.at("mu");
  const auto& A = doc.at("A");
  inst.rho.resize(static_cast<int>(rho.size()));
  for (int i = 0; i < inst.rho.size(); ++i) inst.rho(i) = rho.at(i).get<double>();
  inst.mu.resize(static_cast<int>(mu.size()));
  for (int j = 0; j < inst.mu.size(); ++j) inst.mu(j) = mu.at(j).get<double>();
  inst.A.resize(static_cast<int>(A.size()), inst.mu.size());
  for (int i = 0; i < inst.A.rows(); ++i) {
    const auto& row = A.at(i);
    if (static_cast<int>(row.size()) != inst.A.cols())
      throw std::invalid_argument("instance JSON: ragged A");
    for (int j = 0; j < inst.A.cols(); ++j) inst.A(i, j) = row.at(j).get<double>();
  }
  inst.lifetime = doc.at("N").get<int>();
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << instance_to_json(inst);
}

}  // namespace capmatch
