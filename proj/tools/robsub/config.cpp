#include "config.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "robsub/cluster.hpp"
#include "robsub/csv.hpp"
#include "robsub/error.hpp"
#include "robsub/meanest.hpp"
#include "robsub/spiked.hpp"

namespace robsub::cli {

namespace {

struct TaskName {
  Task task;
  const char* name;
};

constexpr TaskName kTasks[] = {
    {Task::PcaFrob, "pca-frob"},     {Task::PcaSpec, "pca-spec"},         {Task::Poison, "poison"},
    {Task::Mean, "mean"},            {Task::Cluster, "cluster"},          {Task::SpikeDetect, "spike-detect"},
    {Task::SpikeRecover, "spike-recover"}, {Task::Bench, "bench"},
};

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::ConfigError, "--" + key + " expects a number, got '" + v + "'");
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::ConfigError, "--" + key + " expects an integer, got '" + v + "'");
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  fail(ErrorCode::ConfigError, "config values must be strings or numbers");
}

double gen_num(const json& g, const char* key, double fallback) {
  if (!g.contains(key)) return fallback;
  require(g[key].is_number(), ErrorCode::ConfigError, std::string("generator.") + key + " must be a number");
  return g[key].get<double>();
}

Index gen_int(const json& g, const char* key, Index fallback) {
  if (!g.contains(key)) return fallback;
  require(g[key].is_number_integer(), ErrorCode::ConfigError, std::string("generator.") + key + " must be an integer");
  return g[key].get<Index>();
}

Index gen_req_int(const json& g, const char* key) {
  require(g.contains(key), ErrorCode::ConfigError, std::string("generator.") + key + " is required");
  return gen_int(g, key, 0);
}

}  // namespace

Task parse_task(const std::string& name) {
  for (const auto& t : kTasks)
    if (name == t.name) return t.task;
  fail(ErrorCode::ConfigError, "unknown task '" + name + "'");
}

const char* to_string(Task t) {
  for (const auto& x : kTasks)
    if (x.task == t) return x.name;
  return "?";
}

void apply_override(Config& c, const std::string& key, const std::string& v) {
  if (key == "task") c.task = parse_task(v);
  else if (key == "input") c.input = v;
  else if (key == "q") c.q = v;
  else if (key == "kappa") c.kappa = to_double(key, v);
  else if (key == "rank") c.rank = to_int(key, v);
  else if (key == "delta") c.delta = to_double(key, v);
  else if (key == "corruption") c.corruption = v;
  else if (key == "corruption-q") c.corruption_q = v;
  else if (key == "gamma") c.gamma = to_double(key, v);
  else if (key == "eta") c.eta = to_double(key, v);
  else if (key == "tau") c.tau = to_double(key, v);
  else if (key == "sigma") c.sigma = to_double(key, v);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(key, v));
  else if (key == "trials") c.trials = static_cast<int>(to_int(key, v));
  else if (key == "out") c.out = v;
  else if (key == "csv") c.csv = v;
  else if (key == "save-projection") c.save_projection = v;
  else if (key == "clusters") c.clusters = to_int(key, v);
  else if (key == "iterations") c.iterations = static_cast<int>(to_int(key, v));
  else if (key == "theta-min") c.theta_min = to_double(key, v);
  else if (key == "tol-objective") c.tol_objective = to_double(key, v);
  else if (key == "tol-feasibility") c.tol_feasibility = to_double(key, v);
  else if (key == "max-iterations") c.max_iterations = static_cast<int>(to_int(key, v));
  else if (key == "oracle-rounds") c.oracle_rounds = static_cast<int>(to_int(key, v));
  else fail(ErrorCode::ConfigError, "unknown config key '" + key + "'");
}

Config config_from_json(const json& j) {
  require(j.is_object(), ErrorCode::ConfigError, "config must be a JSON object");
  Config c;
  for (const auto& [key, value] : j.items()) {
    if (key == "generator") {
      require(value.is_object(), ErrorCode::ConfigError, "generator must be an object");
      c.generator = value;
    } else {
      apply_override(c, key, scalar_text(value));
    }
  }
  return c;
}

void validate(const Config& c) {
  require(c.input.has_value() != c.generator.has_value(), ErrorCode::ConfigError,
          "give exactly one of input and generator");
  if (c.generator) {
    require(c.generator->contains("type") && (*c.generator)["type"].is_string(), ErrorCode::ConfigError,
            "generator.type must be a string");
  }
  (void)c.exponent();
  (void)parse_exponent(c.corruption_q.empty() ? c.q : c.corruption_q);
  (void)parse_corruption_strategy(c.corruption);
  require(c.rank >= 1, ErrorCode::ConfigError, "rank must be positive");
  require(!c.kappa || (*c.kappa >= 1.0 && std::isfinite(*c.kappa)), ErrorCode::ConfigError, "kappa must be >= 1");
  require(c.delta >= 0.0 && std::isfinite(c.delta), ErrorCode::ConfigError, "delta must be >= 0");
  require(c.trials >= 1, ErrorCode::ConfigError, "trials must be positive");
  require(c.clusters >= 1, ErrorCode::ConfigError, "clusters must be positive");
  require(c.iterations >= 0, ErrorCode::ConfigError, "iterations must be nonnegative");
  require(!c.tau || *c.tau > 0.0, ErrorCode::ConfigError, "tau must be positive");
  require(!c.sigma || *c.sigma > 0.0, ErrorCode::ConfigError, "sigma must be positive");
  require(!c.theta_min || *c.theta_min > 0.0, ErrorCode::ConfigError, "theta-min must be positive");
  try {
    c.solve_params(c.seed).validate();
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
}

json Config::to_json() const {
  json j;
  j["task"] = robsub::cli::to_string(task);
  if (input) j["input"] = *input;
  if (generator) j["generator"] = *generator;
  j["q"] = q;
  if (kappa) j["kappa"] = *kappa;
  j["rank"] = rank;
  j["delta"] = delta;
  j["corruption"] = corruption;
  j["corruption-q"] = corruption_q.empty() ? q : corruption_q;
  j["gamma"] = gamma;
  j["eta"] = eta;
  if (tau) j["tau"] = *tau;
  if (sigma) j["sigma"] = *sigma;
  j["seed"] = seed;
  j["trials"] = trials;
  if (out) j["out"] = *out;
  if (csv) j["csv"] = *csv;
  if (save_projection) j["save-projection"] = *save_projection;
  j["clusters"] = clusters;
  j["iterations"] = iterations;
  if (theta_min) j["theta-min"] = *theta_min;
  j["tol-objective"] = tol_objective;
  j["tol-feasibility"] = tol_feasibility;
  j["max-iterations"] = max_iterations;
  j["oracle-rounds"] = oracle_rounds;
  return j;
}

SolveParams Config::solve_params(std::uint64_t s) const {
  SolveParams p;
  p.tol_objective = tol_objective;
  p.tol_feasibility = tol_feasibility;
  p.max_iterations = max_iterations;
  p.gamma = gamma;
  p.eta = eta;
  p.tau = tau.value_or(0.0);
  p.seed = s;
  p.oracle_rounds = oracle_rounds;
  return p;
}

CorruptionSpec Config::corruption_spec() const {
  CorruptionSpec s;
  s.delta = delta;
  s.q = parse_exponent(corruption_q.empty() ? q : corruption_q);
  s.strategy = parse_corruption_strategy(corruption);
  return s;
}

Dataset make_dataset(const Config& c, std::uint64_t seed) {
  Dataset d;
  if (c.input) {
    d.A = DataMatrix(read_matrix_csv(*c.input));
    return d;
  }
  const json& g = *c.generator;
  const std::string type = g["type"].get<std::string>();
  const Exponent q = c.exponent();

  if (type == "gaussian") {
    const Index n = gen_req_int(g, "n");
    const Index m = gen_req_int(g, "m");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat a(n, m);
    for (Index j = 0; j < m; ++j)
      for (Index i = 0; i < n; ++i) a(i, j) = nd(rng);
    d.A = DataMatrix(std::move(a));
  } else if (type == "identity") {
    const Index n = gen_req_int(g, "n");
    d.A = DataMatrix(Mat(gen_num(g, "scale", 1.0) * Mat::Identity(n, n)));
  } else if (type == "planted") {
    // Columns in a sparse planted subspace plus optional Gaussian noise.
    const Index n = gen_req_int(g, "n");
    const Index m = gen_req_int(g, "m");
    const Index r = gen_int(g, "rank", c.rank);
    const Index s = gen_int(g, "support", 2);
    const double noise = gen_num(g, "noise", 0.0);
    require(r * s <= n, ErrorCode::ConfigError, "rank * support exceeds n");
    SpikeModel plant = make_sparse_spike(n, r, s, 1.0, 1.0, seed, q);
    std::mt19937_64 rng(derive_seed(seed, 1));
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat coef(r, m), e(n, m);
    for (Index j = 0; j < m; ++j) {
      for (Index i = 0; i < r; ++i) coef(i, j) = nd(rng);
      for (Index i = 0; i < n; ++i) e(i, j) = noise * nd(rng);
    }
    d.A = DataMatrix(Mat(plant.U * coef + e));
    d.basis = plant.U;
    d.kappa = plant.kappa;
  } else if (type == "sparse-mean") {
    const MeanInstance inst = make_sparse_mean_instance(gen_req_int(g, "n"), gen_int(g, "support", 25),
                                                        gen_num(g, "sigma", 0.1), gen_req_int(g, "m"), q, seed);
    d.A = inst.A;
    d.mu = inst.mu;
    d.sigma = inst.sigma;
    d.kappa = inst.kappa;
  } else if (type == "mean-lb") {
    const MeanLbInstance inst = mean_lb_instance(gen_req_int(g, "n"), gen_num(g, "sigma", 0.1),
                                                 gen_req_int(g, "m"), seed);
    d.A = inst.A;
    d.A_alt = inst.A_tilde;
    d.mu = inst.mu1;
    d.mu_alt = inst.mu2;
    d.sigma = inst.sigma;
    d.kappa = inst.kappa;
    d.separation = inst.separation;
  } else if (type == "mixture") {
    const Index n = gen_req_int(g, "n");
    const Index m = gen_req_int(g, "m");
    const Index k = gen_int(g, "clusters", c.clusters);
    const Index s = gen_int(g, "support", 2);
    const double sigma = gen_num(g, "sigma", 0.1);
    const double kappa = std::sqrt(static_cast<double>(k * s));
    const double sep = g.contains("separation")
                           ? gen_num(g, "separation", 0.0)
                           : stable_separation(gen_num(g, "c", 20.0), k, kappa, c.delta, sigma);
    const ClusterInstance inst = make_gaussian_mixture(n, k, m, sigma, sep, s, c.delta, seed);
    d.A = inst.A;
    d.sigma = sigma;
    d.kappa = kappa;
    d.centers = inst.centers;
    d.labels = inst.labels;
    d.separation = sep;
  } else if (type == "spike") {
    const Index n = gen_req_int(g, "n");
    const Index m = gen_req_int(g, "m");
    const Index r = gen_int(g, "rank", c.rank);
    const double tmin = gen_num(g, "theta_min", 1.0);
    const double tmax = gen_num(g, "theta_max", tmin);
    // The plant is fixed by plant_seed; only the samples follow the trial seed.
    const auto plant_seed = static_cast<std::uint64_t>(gen_int(g, "plant_seed", 0));
    SpikeModel model = make_sparse_spike(n, r, gen_int(g, "support", 2), tmin, tmax, plant_seed, q);
    if (g.value("null", false)) model.lambdas.setZero();
    d.A = scm_sample(model, m, seed);
    d.basis = model.U;
    d.kappa = model.kappa;
    d.theta_min = tmin;
    d.sigma_star = model.U * model.lambdas.asDiagonal() * model.U.transpose();
  } else {
    fail(ErrorCode::ConfigError, "unknown generator type '" + type + "'");
  }
  return d;
}

}  // namespace robsub::cli
