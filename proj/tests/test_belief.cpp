#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "capmatch/belief.hpp"
#include "capmatch/instance.hpp"
#include "capmatch/rng.hpp"

using namespace capmatch;

namespace {

Instance two_type_instance() {
  Instance inst;
  inst.rho = Eigen::VectorXd::Ones(2);
  inst.mu = Eigen::VectorXd::Ones(2);
  inst.A.resize(2, 2);
  inst.A << 0.9, 0.4,
            0.1, 0.4;
  inst.lifetime = 30;
  return inst;
}

}  // namespace

TEST_CASE("single update forms the likelihood ratio") {
  const Instance inst = two_type_instance();
  WorkerBelief b = make_belief(inst);
  CHECK(log_odds(b, 0, 1) == doctest::Approx(0.0));  // equal priors

  update(b, 0, 1, inst);
  CHECK(b.jobs_completed == 1);
  CHECK(std::exp(log_odds(b, 0, 1)) == doctest::Approx(9.0).epsilon(1e-12));

  SUBCASE("uninformative job leaves odds unchanged") {
    const double before = log_odds(b, 0, 1);
    update(b, 1, 1, inst);  // both types pay 0.4
    CHECK(log_odds(b, 0, 1) == doctest::Approx(before).epsilon(1e-12));
  }
}

TEST_CASE("skewed priors show up in the prior odds") {
  Instance inst = two_type_instance();
  inst.rho << 2.0, 1.0;
  const WorkerBelief b = make_belief(inst);
  CHECK(log_odds(b, 0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("impossible observations eliminate types") {
  Instance inst = two_type_instance();
  inst.A(1, 0) = 0.0;
  WorkerBelief b = make_belief(inst);
  update(b, 0, 1, inst);  // success where type 1 cannot succeed
  CHECK(b.eliminated[1]);
  CHECK_FALSE(b.eliminated[0]);
  CHECK(log_odds(b, 0, 1) == std::numeric_limits<double>::infinity());
  CHECK(log_odds(b, 1, 0) == -std::numeric_limits<double>::infinity());
  CHECK(map_estimate(b) == 0);
  const Eigen::VectorXd g = posterior(b);
  CHECK(g(1) == 0.0);
  CHECK(g(0) == doctest::Approx(1.0));
}

TEST_CASE("updating with the unmatched pseudo-job is a fault") {
  const Instance inst = two_type_instance();
  WorkerBelief b = make_belief(inst);
  CHECK_THROWS(update(b, inst.kappa(), 1, inst));
}

TEST_CASE("map estimate breaks ties toward the lowest index") {
  const Instance inst = two_type_instance();
  const WorkerBelief fresh = make_belief(inst);
  CHECK(map_estimate(fresh) == 0);

  WorkerBelief b = make_belief(inst);
  update(b, 0, 1, inst);
  CHECK(map_estimate(b) == 0);
  WorkerBelief c = make_belief(inst);
  update(c, 0, 0, inst);  // failure favors type 1
  CHECK(map_estimate(c) == 1);
}

TEST_CASE("posterior is a softmax of the log posteriors") {
  Instance inst;
  inst.rho = Eigen::VectorXd::Ones(3);
  inst.mu = Eigen::VectorXd::Ones(2);
  inst.A.resize(3, 2);
  inst.A << 0.2, 0.3,
            0.5, 0.6,
            0.8, 0.9;
  inst.lifetime = 30;

  const WorkerBelief fresh = make_belief(inst);
  CHECK(posterior(fresh).isApproxToConstant(1.0 / 3.0, 1e-12));

  WorkerBelief b = make_belief(inst);
  b.log_lik(0) = std::log(9.0);  // two survivors ln 9 apart, one eliminated
  b.log_lik(1) = 0.0;
  b.eliminated[2] = true;
  const Eigen::VectorXd g = posterior(b);
  CHECK(g(0) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(g(1) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g(2) == 0.0);
  CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("posterior ignores observation order") {
  const Instance inst = two_type_instance();
  SplitMix64 rng(123);
  std::vector<std::pair<int, int>> events;
  for (int k = 0; k < 40; ++k)
    events.emplace_back(static_cast<int>(rng.bounded(2)), static_cast<int>(rng.bounded(2)));

  WorkerBelief forward = make_belief(inst);
  for (const auto& [j, x] : events) update(forward, j, x, inst);

  for (int perm = 0; perm < 10; ++perm) {
    rng.shuffle(events);
    WorkerBelief shuffled = make_belief(inst);
    for (const auto& [j, x] : events) update(shuffled, j, x, inst);
    for (int i = 0; i < 2; ++i)
      CHECK(shuffled.log_lik(i) == doctest::Approx(forward.log_lik(i)).epsilon(1e-12));
  }
}

TEST_CASE("odds are reciprocal in log space") {
  const Instance inst = two_type_instance();
  SplitMix64 rng(5);
  WorkerBelief b = make_belief(inst);
  for (int k = 0; k < 25; ++k)
    update(b, static_cast<int>(rng.bounded(2)), static_cast<int>(rng.bounded(2)), inst);
  CHECK(log_odds(b, 0, 1) == doctest::Approx(-log_odds(b, 1, 0)).epsilon(1e-12));
}

TEST_CASE("posterior concentrates on the true type under full-support sampling") {
  const GenConfig cfg{.seed = 606};
  SplitMix64 rng(909);
  std::vector<double> final_mass;
  for (int trial = 0; trial < 1000; ++trial) {
    const Instance inst = generate_instance(cfg, static_cast<std::uint64_t>(trial % 25));
    const int truth = static_cast<int>(rng.bounded(3));
    WorkerBelief b = make_belief(inst);
    for (int k = 0; k < 200; ++k) {
      const int j = static_cast<int>(rng.bounded(3));
      update(b, j, rng.bernoulli(inst.A(truth, j)) ? 1 : 0, inst);
    }
    final_mass.push_back(posterior(b)(truth));
  }
  std::nth_element(final_mass.begin(), final_mass.begin() + 500, final_mass.end());
  CHECK(final_mass[500] > 0.99);
}

TEST_CASE("capped odds rescale by the regret scale and saturate") {
  const Instance inst = two_type_instance();
  LearningStructure s;
  s.strong_from = {{1}, {}};  // type 0 must distinguish type 1; not vice versa
  s.regret_scale.setOnes(2, 2);
  s.regret_scale(0, 1) = 0.5;

  WorkerBelief b = make_belief(inst);
  b.log_lik(0) = std::log(10.0);

  // In-Str pair: plain rescaled odds.
  CHECK(capped_odds(b, 0, 1, s, 30) == doctest::Approx(20.0).epsilon(1e-12));

  // Out-of-Str pair below the gate: rescaled odds pass through.
  WorkerBelief fresh = make_belief(inst);
  CHECK(capped_odds(fresh, 1, 0, s, 30) == doctest::Approx(1.0).epsilon(1e-12));

  // Out-of-Str pair at or above the gate snaps to the lifetime.
  WorkerBelief strong_b = make_belief(inst);
  strong_b.log_lik(1) = std::log(2.0 * std::log(30.0));
  CHECK(capped_odds(strong_b, 1, 0, s, 30) == doctest::Approx(30.0));

  // Overflow-prone odds saturate instead of wrapping.
  WorkerBelief huge = make_belief(inst);
  huge.log_lik(0) = 1e4;
  CHECK(capped_odds(huge, 0, 1, s, 30) == std::numeric_limits<double>::infinity());
}
