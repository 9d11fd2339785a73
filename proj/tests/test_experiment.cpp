#include "singlab/experiment.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <fstream>

using namespace singlab;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

std::filesystem::path scratch(const std::string& leaf) {
  return std::filesystem::temp_directory_path() / "singlab_exp" / leaf;
}

}  // namespace

TEST_CASE("unknown keys are rejected everywhere") {
  CHECK_THROWS_AS(validate_config(json{{"experiment", "params"}, {"bogus", 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_config(json{{"experiment", "params"}, {"params", {{"zeta", 1}}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_config(json{{"experiment", "frobnicate"}}), std::invalid_argument);
  CHECK_THROWS_AS(validate_config(json{{"omega_key", "const1"}}), std::invalid_argument);
  CHECK_NOTHROW(validate_config(json{{"experiment", "params"}}));
}

TEST_CASE("params experiment reproduces the reference tuple") {
  json cfg;
  cfg["experiment"] = "params";
  cfg["params"] = {{"d", 2}, {"delta", 1.0}, {"gamma", 0.0}, {"iota", 0.0},
                   {"eps0", 0.5}, {"mu", 0.0}, {"N1", 1}};
  ExperimentOutcome outcome = run_experiment(cfg, scratch("params"));
  CHECK(outcome.result["admissible"].get<bool>());
  CHECK(outcome.result["s1"].get<double>() == -0.5);
  CHECK(outcome.result["s2"].get<double>() == -1.0);
  CHECK(outcome.result["s3"].get<double>() == -1.0);
  CHECK(outcome.result["s4"].get<double>() == -0.5);
  CHECK(outcome.result["library_version"].is_string());
}

TEST_CASE("norms experiment emits the constant-density values") {
  json cfg;
  cfg["experiment"] = "norms";
  cfg["omega_key"] = "const1";
  cfg["resolution"] = 512;
  ExperimentOutcome outcome = run_experiment(cfg, scratch("norms"));
  CHECK(outcome.result["norms"]["l1"].get<double>() == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(outcome.result["norms"]["c_omega"].get<double>() ==
        doctest::Approx(kTwoPi * (1 + std::log(3.0))).epsilon(1e-12));
}

TEST_CASE("cz experiment verifies its shipped fixture") {
  json cfg;
  cfg["experiment"] = "cz";
  cfg["grid"] = {{"d", 2}, {"N", 128}, {"L", 4.0}};
  cfg["seed"] = 7;
  ExperimentOutcome outcome = run_experiment(cfg, scratch("cz"));
  CHECK(outcome.result["all_pass"].get<bool>());
}

TEST_CASE("kernel-check experiment is sample-stable") {
  json cfg;
  cfg["experiment"] = "kernel-check";
  cfg["kernel_key"] = "power";
  cfg["samples"] = 4000;
  cfg["seed"] = 5;
  ExperimentOutcome outcome = run_experiment(cfg, scratch("kc"));
  CHECK(outcome.result["c_size"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("probe experiment: format, determinism, and config round trip") {
  json cfg;
  cfg["experiment"] = "probe";
  cfg["omega_key"] = "theta1";
  cfg["kernel_key"] = "power";
  cfg["grid"] = {{"d", 2}, {"N", 64}, {"L", 2.0}};
  cfg["probe"] = {{"epsilons", {0.5, 0.25}}, {"lambda_points", 8}, {"measure_radius", 1.0}};
  cfg["seed"] = 3;

  ExperimentOutcome first = run_experiment(cfg, scratch("probe_a"));
  std::string csv_a = slurp(scratch("probe_a") / "probe_result.csv");

  // header plus one row per (epsilon, lambda)
  CHECK(std::count(csv_a.begin(), csv_a.end(), '\n') == 1 + 2 * 8);
  CHECK(csv_a.rfind("experiment,epsilon,lambda,measure,weak_term,weak_ratio,l1_ratio,grid_N,seed",
                    0) == 0);

  run_experiment(cfg, scratch("probe_b"));
  CHECK(csv_a == slurp(scratch("probe_b") / "probe_result.csv"));

  // the echoed config re-executes to identical bytes
  json echoed = first.result["resolved_config"];
  run_experiment(echoed, scratch("probe_c"));
  CHECK(csv_a == slurp(scratch("probe_c") / "probe_result.csv"));

  for (const auto& row : first.result["family"]) {
    CHECK(row["weak_ratio"].get<double>() <= row["l1_ratio"].get<double>() + 1e-12);
  }
}

TEST_CASE("net experiment reports the packing count") {
  json cfg;
  cfg["experiment"] = "net";
  cfg["net"] = {{"n", 8}, {"gamma", 0.25}};
  cfg["resolution"] = 1 << 16;
  ExperimentOutcome outcome = run_experiment(cfg, scratch("net"));
  auto count = outcome.result["cardinality"].get<Eigen::Index>();
  CHECK(std::abs(count - 402) <= 1);
  CHECK(outcome.result["vectors"].size() == static_cast<size_t>(count));
}
