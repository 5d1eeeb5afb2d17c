#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "robsub/matcore.hpp"
#include "robsub/poisoning.hpp"
#include "robsub/sdpsolve.hpp"

namespace robsub::cli {

using nlohmann::json;

enum class Task { PcaFrob, PcaSpec, Poison, Mean, Cluster, SpikeDetect, SpikeRecover, Bench };

Task parse_task(const std::string& name);
const char* to_string(Task t);

struct Config {
  Task task = Task::PcaFrob;
  std::optional<std::string> input;
  std::optional<json> generator;
  std::string q = "inf";
  std::optional<double> kappa;
  Index rank = 1;
  double delta = 0.0;
  std::string corruption = "iid-uniform";
  std::string corruption_q;  // defaults to q
  double gamma = 1.0;
  double eta = 0.1;
  std::optional<double> tau;
  std::optional<double> sigma;
  std::uint64_t seed = 0;
  int trials = 1;
  std::optional<std::string> out;
  std::optional<std::string> csv;
  std::optional<std::string> save_projection;
  Index clusters = 2;
  int iterations = 25;
  std::optional<double> theta_min;
  double tol_objective = 1e-4;
  double tol_feasibility = 1e-6;
  int max_iterations = 5000;
  int oracle_rounds = 100;

  json to_json() const;
  SolveParams solve_params(std::uint64_t seed) const;
  Exponent exponent() const { return parse_exponent(q); }
  CorruptionSpec corruption_spec() const;
};

// Keys are the kebab-case flag names; unknown keys are a ConfigError.
Config config_from_json(const json& j);
void apply_override(Config& c, const std::string& key, const std::string& value);
void validate(const Config& c);

// Data produced by a generator or loaded from a file, with whatever ground
// truth the generator knows.
struct Dataset {
  DataMatrix A{Mat::Zero(1, 1)};
  std::optional<DataMatrix> A_alt;  // second member of a two-dataset generator
  std::optional<Mat> basis;         // planted subspace
  std::optional<Vec> mu;
  std::optional<Vec> mu_alt;
  std::optional<double> sigma;
  std::optional<double> kappa;
  std::optional<double> separation;
  std::optional<double> theta_min;
  std::optional<Mat> centers;
  std::optional<Mat> sigma_star;
  std::vector<Index> labels;
};

Dataset make_dataset(const Config& c, std::uint64_t seed);

}  // namespace robsub::cli
