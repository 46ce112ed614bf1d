#include <doctest.h>

#include <filesystem>
#include <set>

#include "capmatch/instance.hpp"

using namespace capmatch;

TEST_CASE("generation is a pure function of (seed, index)") {
  const GenConfig cfg{.seed = 42};
  const Instance a = generate_instance(cfg, 7);
  const Instance b = generate_instance(cfg, 7);
  CHECK(a.rho == b.rho);
  CHECK(a.mu == b.mu);
  CHECK(a.A == b.A);
  CHECK(a.lifetime == b.lifetime);

  const Instance c = generate_instance(cfg, 8);
  CHECK(a.A != c.A);
}

TEST_CASE("generated instances respect the sampling ranges") {
  const GenConfig cfg{.seed = 3};
  for (std::uint64_t k = 0; k < 50; ++k) {
    const Instance inst = generate_instance(cfg, k);
    CHECK(validate_instance(inst).empty());
    CHECK((inst.mu.array() >= 0.5).all());
    CHECK((inst.mu.array() <= 1.5).all());
    CHECK((inst.A.array() >= 0.0).all());
    CHECK((inst.A.array() <= 1.0).all());
    CHECK(inst.rho == Eigen::VectorXd::Ones(3));
    CHECK(inst.lifetime == 30);
  }
}

TEST_CASE("a default batch of 350 instances is valid and distinct") {
  const GenConfig cfg{.seed = 2024};
  std::set<std::string> seen;
  for (std::uint64_t k = 0; k < 350; ++k) {
    const Instance inst = generate_instance(cfg, k);
    CHECK(validate_instance(inst).empty());
    seen.insert(instance_to_json(inst));
  }
  CHECK(seen.size() == 350);
}

TEST_CASE("validate_instance names the failed invariant") {
  Instance inst;
  inst.rho = Eigen::VectorXd::Ones(2);
  inst.mu = Eigen::VectorXd::Ones(2);
  inst.A.setConstant(2, 2, 0.5);
  inst.lifetime = 30;

  SUBCASE("valid") {
    inst.A << 0.2, 0.4, 0.6, 0.8;
    CHECK(validate_instance(inst).empty());
  }
  SUBCASE("duplicate rows") {
    const auto violations = validate_instance(inst);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "duplicate A rows");
  }
  SUBCASE("nonpositive mu") {
    inst.A << 0.2, 0.4, 0.6, 0.8;
    inst.mu(1) = 0.0;
    const auto violations = validate_instance(inst);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "nonpositive mu");
  }
  SUBCASE("payoff outside range") {
    inst.A << 0.2, 1.4, 0.6, 0.8;
    const auto violations = validate_instance(inst);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0] == "payoff entries outside [0,1]");
  }
}

namespace {
Instance tiny(std::initializer_list<double> rho, std::initializer_list<double> mu) {
  Instance inst;
  inst.rho = Eigen::VectorXd::Zero(static_cast<int>(rho.size()));
  int k = 0;
  for (double v : rho) inst.rho(k++) = v;
  inst.mu = Eigen::VectorXd::Zero(static_cast<int>(mu.size()));
  k = 0;
  for (double v : mu) inst.mu(k++) = v;
  inst.A = Eigen::MatrixXd::Zero(inst.rho.size(), inst.mu.size());
  for (int i = 0; i < inst.A.rows(); ++i)
    for (int j = 0; j < inst.A.cols(); ++j) inst.A(i, j) = 0.1 + 0.07 * (i + 2 * j + 1);
  inst.lifetime = 30;
  return inst;
}
}  // namespace

TEST_CASE("generalized imbalance by direct subset enumeration") {
  CHECK(check_generalized_imbalance(tiny({1.0, 1.0}, {0.8})));
  CHECK_FALSE(check_generalized_imbalance(tiny({1.0, 1.0}, {1.0})));
  CHECK(check_generalized_imbalance(tiny({0.5, 0.5}, {0.6, 0.6})));
}

TEST_CASE("generalized imbalance is permutation invariant") {
  const GenConfig cfg{.seed = 11};
  for (std::uint64_t k = 0; k < 20; ++k) {
    Instance inst = generate_instance(cfg, k);
    const bool base = check_generalized_imbalance(inst);
    inst.rho.reverseInPlace();
    inst.mu.reverseInPlace();
    inst.A = inst.A.rowwise().reverse().colwise().reverse().eval();
    CHECK(check_generalized_imbalance(inst) == base);
  }
}

TEST_CASE("generated instances satisfy generalized imbalance") {
  const GenConfig cfg{.seed = 5};
  for (std::uint64_t k = 0; k < 100; ++k)
    CHECK(check_generalized_imbalance(generate_instance(cfg, k)));
}

TEST_CASE("instance JSON round trip is bit exact") {
  const Instance inst = generate_instance(GenConfig{.seed = 9}, 4);
  const std::string text = instance_to_json(inst);
  const Instance back = instance_from_json(text);
  CHECK(back.rho == inst.rho);
  CHECK(back.mu == inst.mu);
  CHECK(back.A == inst.A);
  CHECK(back.lifetime == inst.lifetime);
  CHECK(instance_to_json(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "capmatch_inst_test.json";
  save_instance(inst, path.string());
  const Instance loaded = load_instance(path.string());
  CHECK(loaded.A == inst.A);
  std::filesystem::remove(path);
}
