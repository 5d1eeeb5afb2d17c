#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "config.hpp"
#include "robsub/csv.hpp"
#include "robsub/error.hpp"
#include "robsub/version.hpp"
#include "tasks.hpp"

using namespace robsub;
using namespace robsub::cli;

namespace {

const char* kKeys[] = {"input",      "q",          "kappa",         "rank",          "delta",
                       "corruption", "corruption-q", "gamma",       "eta",           "tau",
                       "sigma",      "seed",       "trials",        "out",           "csv",
                       "save-projection", "clusters", "iterations", "theta-min",     "tol-objective",
                       "tol-feasibility", "max-iterations", "oracle-rounds"};

unsigned thread_cap(int trials) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ROBSUB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = static_cast<unsigned>(v);
  }
  return std::min(cap, static_cast<unsigned>(trials));
}

std::vector<TrialResult> run_trials(const Config& c) {
  const int n = c.trials;
  std::vector<TrialResult> results(static_cast<std::size_t>(n));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < n; t = next++) {
      try {
        results[static_cast<std::size_t>(t)] = run_trial(c, t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  const unsigned threads = thread_cap(n);
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  require(static_cast<bool>(f), ErrorCode::IoError, "cannot open '" + path + "' for writing");
  f << text;
  require(static_cast<bool>(f), ErrorCode::IoError, "write to '" + path + "' failed");
}

int run(int argc, char** argv) {
  CLI::App app{"Robust low-dimensional representations"};
  std::string task;
  std::string config_path;
  std::string generator;
  std::map<std::string, std::string> flags;
  app.add_option("task", task, "pca-frob, pca-spec, poison, mean, cluster, spike-detect, spike-recover or bench")
      ->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--generator", generator, "generator spec as inline JSON");
  for (const char* key : kKeys) app.add_option(std::string("--") + key, flags[key]);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  Config c;
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    require(static_cast<bool>(f), ErrorCode::IoError, "cannot open config '" + config_path + "'");
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      fail(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    c = config_from_json(j);
  }
  c.task = parse_task(task);
  if (!generator.empty()) {
    try {
      c.generator = json::parse(generator);
    } catch (const json::exception& e) {
      fail(ErrorCode::ConfigError, std::string("--generator is not valid JSON: ") + e.what());
    }
    c.input.reset();
  }
  for (const char* key : kKeys)
    if (app.count(std::string("--") + key) > 0) {
      apply_override(c, key, flags[key]);
      if (std::string(key) == "input") c.generator.reset();
    }
  validate(c);

  const std::vector<TrialResult> results = run_trials(c);
  json report;
  report["library"] = "robsub";
  report["version"] = ROBSUB_VERSION;
  report["seed"] = c.seed;
  report["config"] = c.to_json();
  report["trials"] = json::array();
  report["timing"] = json::array();
  bool bad = false;
  for (const auto& r : results) {
    report["trials"].push_back(r.record);
    report["timing"].push_back(r.timing);
    bad = bad || r.bad_input;
  }
  report["aggregate"] = aggregate(results);
  report["bad_input"] = bad;

  const std::string text = report.dump(2) + "\n";
  if (c.out) write_text(*c.out, text);
  else std::cout << text;
  if (c.csv) write_text(*c.csv, long_csv(results));
  if (c.save_projection) {
    require(results.front().projection.has_value(), ErrorCode::ConfigError,
            "this task produced no projection to save");
    write_matrix_csv(*c.save_projection, *results.front().projection);
  }
  return bad ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "robsub: " << to_string(e.code()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "robsub: " << e.what() << "\n";
    return 1;
  }
}
