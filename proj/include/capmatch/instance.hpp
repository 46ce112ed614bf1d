#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capmatch/rng.hpp"

namespace capmatch {

// Strict-inequality tolerance for the generalized imbalance check.
inline constexpr double kImbalanceTol = 1e-9;

// A market instance: worker-type masses rho, job-type arrival masses mu, the
// success-probability matrix A (workers x jobs), and the worker lifetime in
// job opportunities. The unmatched option kappa is implicit: it occupies job
// index n_job_types(), pays 0, and has unbounded capacity; it is never stored
// in A or mu.
struct Instance {
  Eigen::VectorXd rho;
  Eigen::VectorXd mu;
  Eigen::MatrixXd A;
  int lifetime = 0;

  int n_worker_types() const { return static_cast<int>(rho.size()); }
  int n_job_types() const { return static_cast<int>(mu.size()); }
  int kappa() const { return n_job_types(); }

  // Per-period arrival mass of worker type i.
  double rho_hat(int i) const { return rho(i) / lifetime; }

  // Success probability, with the implicit kappa column.
  double payoff(int i, int j) const { return j == kappa() ? 0.0 : A(i, j); }
};

struct GenConfig {
  std::uint64_t seed = 0;
  int n_worker_types = 3;
  int n_job_types = 3;
  int lifetime = 30;
  double rho_all = 1.0;
  double mu_low = 0.5;
  double mu_high = 1.5;
};

// Random instance, a pure function of (cfg.seed, index): mu ~ U[mu_low, mu_high]
// i.i.d., A entries ~ U[0,1] i.i.d., rho constant. A draws producing duplicate
// A rows are regenerated.
Instance generate_instance(const GenConfig& cfg, std::uint64_t index);

// Empty iff all Instance invariants hold; each entry names the failed invariant.
std::vector<std::string> validate_instance(const Instance& inst);

// True iff no nonempty subset of worker masses ties any subset of job masses
// within tol. kappa is excluded: its infinite capacity can never tie a finite
// sum. Exhaustive over 2^|I| x 2^|J| subset pairs, so intended for small type
// counts only.
bool check_generalized_imbalance(const Instance& inst, double tol = kImbalanceTol);

// JSON file format: {"rho": [...], "mu": [...], "A": [[...], ...], "N": n}.
// Floats are written with 17 significant digits so a save/load round trip is
// bit exact.
std::string instance_to_json(const Instance& inst);
Instance instance_from_json(const std::string& text);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace capmatch
