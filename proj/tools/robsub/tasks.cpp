#include "tasks.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "robsub/cluster.hpp"
#include "robsub/error.hpp"
#include "robsub/linalg.hpp"
#include "robsub/lowrank.hpp"
#include "robsub/meanest.hpp"
#include "robsub/poisoning.hpp"
#include "robsub/spiked.hpp"

namespace robsub::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double need(const std::optional<double>& cfg, const std::optional<double>& data, const char* what) {
  if (cfg) return *cfg;
  if (data) return *data;
  fail(ErrorCode::ConfigError, std::string(what) + " is required for this task");
}

void put_pca(json& rec, const PcaResult& res) {
  rec["objective"] = res.relaxation.objective;
  rec["projection_rank"] = res.projection.rank();
  rec["certified_q_to_2"] = res.certified_q_to_2();
  rec["norm_lower_q_to_2"] = std::sqrt(res.norm.lower_bound);
  rec["iterations"] = res.relaxation.iterations;
  rec["iteration_limit"] = res.relaxation.iteration_limit;
  rec["cuts"] = res.relaxation.cuts;
}

void put_subspace(json& rec, const Dataset& d, const Projection& p) {
  if (d.basis) rec["sin_theta_sq"] = sin_theta_sq(p, Projection::from_orthonormal(*d.basis));
}

}  // namespace

TrialResult run_trial(const Config& c, int trial) {
  const std::uint64_t seed = derive_seed(c.seed, static_cast<std::uint64_t>(trial));
  TrialResult out;
  json& rec = out.record;
  rec["trial"] = trial;
  rec["seed"] = seed;
  const auto t0 = Clock::now();
  const Dataset d = make_dataset(c, seed);
  out.timing["generate_s"] = seconds_since(t0);

  const Exponent q = c.exponent();
  const SolveParams params = c.solve_params(seed);
  const DataMatrix& a = d.A;
  DataMatrix at = a;
  if (c.delta > 0.0 && c.task != Task::SpikeDetect && c.task != Task::SpikeRecover)
    at = corrupt_instance(a, c.corruption_spec(), derive_seed(seed, 7));
  rec["n"] = a.n();
  rec["m"] = a.m();
  if (c.delta > 0.0) rec["corruption_distance"] = max_column_distance(at.mat(), a.mat(), c.corruption_spec().q);

  const auto t1 = Clock::now();
  switch (c.task) {
    case Task::PcaFrob: {
      const RobustnessBudget budget(q, need(c.kappa, d.kappa, "kappa"));
      const PcaResult res = robust_pca_frobenius(at, c.rank, budget, params);
      put_pca(rec, res);
      const double f2 = a.mat().squaredNorm();
      rec["error"] = frobenius_error(a, res.projection);
      rec["relative_error"] = f2 > 0.0 ? rec["error"].get<double>() / f2 : 0.0;
      put_subspace(rec, d, res.projection);
      out.projection = res.projection.basis();
      break;
    }
    case Task::PcaSpec: {
      const RobustnessBudget budget(q, need(c.kappa, d.kappa, "kappa"));
      const PcaResult res = robust_pca_spectral(at, c.rank, budget, params);
      put_pca(rec, res);
      const double s = spectral_norm(a.mat());
      rec["error"] = spectral_error(a, res.projection);
      rec["relative_error"] = s > 0.0 ? rec["error"].get<double>() / s : 0.0;
      put_subspace(rec, d, res.projection);
      out.projection = res.projection.basis();
      break;
    }
    case Task::Poison: {
      const RobustnessBudget budget(q, need(c.kappa, d.kappa, "kappa"));
      double tau = 0.0;
      if (c.tau) {
        tau = *c.tau;
      } else {
        tau = 2.0 * need(c.sigma, d.sigma, "tau or sigma") * std::sqrt(static_cast<double>(a.m()));
      }
      const auto cert = certify_or_project_spectral(at, tau, c.rank, budget, params);
      rec["tau"] = tau;
      if (cert.solved()) {
        rec["status"] = "solved";
        rec["residual"] = cert.value().residual;
        rec["clean_spectral_error"] = spectral_error(a, cert.value().pca.projection);
        rec["certified_q_to_2"] = cert.value().pca.certified_q_to_2();
        out.projection = cert.value().pca.projection.basis();
      } else {
        rec["status"] = "bad-input";
        rec["residual"] = cert.bad_input().residual;
        out.bad_input = true;
      }
      const PcaResult fro = robust_pca_frobenius_poisoned(at, c.delta, c.rank, budget, params);
      rec["frobenius_clean_error"] = frobenius_error(a, fro.projection);
      rec["frobenius_certified_q_to_2"] = fro.certified_q_to_2();
      break;
    }
    case Task::Mean: {
      const double kappa = need(c.kappa, d.kappa, "kappa");
      const double sigma = need(c.sigma, d.sigma, "sigma");
      auto one = [&](const DataMatrix& x, const std::optional<Vec>& truth, const std::string& tag) {
        const auto est = robust_mean(x, kappa, sigma, q, params);
        if (!est.solved()) {
          rec[tag + "status"] = "bad-input";
          rec[tag + "residual"] = est.bad_input().residual;
          rec[tag + "tau"] = est.bad_input().tau;
          out.bad_input = true;
          return std::optional<Vec>();
        }
        rec[tag + "status"] = "solved";
        rec[tag + "residual"] = est.value().certificate.residual;
        if (truth) rec[tag + "error"] = (est.value().mu_hat - *truth).norm();
        return std::optional<Vec>(est.value().mu_hat);
      };
      if (d.A_alt) {
        // Two-dataset generator: each member is the other's corruption.
        rec["separation"] = *d.separation;
        const auto m1 = one(a, d.mu, "first_");
        const auto m2 = one(*d.A_alt, d.mu_alt, "second_");
        if (m1 && m2) {
          // Against both means, whichever member the estimate came from.
          double worst = 0.0;
          for (const Vec* mu : {&*d.mu, &*d.mu_alt}) {
            worst = std::max(worst, (*m1 - *mu).norm());
            worst = std::max(worst, (*m2 - *mu).norm());
          }
          rec["worst_pair_error"] = worst;
        }
      } else {
        one(at, d.mu, "");
      }
      break;
    }
    case Task::Cluster: {
      const double kappa = need(c.kappa, d.kappa, "kappa");
      const double sigma = need(c.sigma, d.sigma, "sigma");
      const Index k = d.centers ? d.centers->cols() : c.clusters;
      const auto res = robust_lloyd(at, k, kappa, sigma, q, c.iterations, params);
      if (!res.solved()) {
        rec["status"] = "bad-input";
        rec["residual"] = res.bad_input().residual;
        rec["tau"] = res.bad_input().tau;
        out.bad_input = true;
        break;
      }
      const LloydResult& lr = res.value();
      rec["status"] = "solved";
      rec["empty_updates"] = lr.empty_updates;
      if (!d.labels.empty()) {
        rec["misclassification"] = misclassification(lr.assignment, d.labels);
        const auto perm = best_label_matching(lr.assignment, d.labels, k);
        double err = 0.0;
        for (Index r = 0; r < k; ++r)
          err = std::max(err, (lr.centers.col(r) - d.centers->col(perm[static_cast<std::size_t>(r)])).norm());
        rec["center_error"] = err;
      }
      out.projection = lr.projection.basis();
      break;
    }
    case Task::SpikeDetect: {
      const double theta = need(c.theta_min, d.theta_min, "theta-min");
      const SpikeDetection det = spike_detect_sdp(a, c.rank, need(c.kappa, d.kappa, "kappa"), q, theta, params);
      rec["yes"] = det.yes;
      rec["statistic"] = det.statistic;
      rec["threshold"] = det.threshold;
      rec["iterations"] = det.relaxation.iterations;
      break;
    }
    case Task::SpikeRecover: {
      const SpikeRecovery sr = spike_recover_sdp(a, c.rank, need(c.kappa, d.kappa, "kappa"), q, params);
      put_subspace(rec, d, sr.projection);
      if (d.sigma_star) rec["sigma_error_fro2"] = (sr.Sigma_hat - *d.sigma_star).squaredNorm();
      rec["certified_q_to_2"] = sr.certified_q_to_2();
      rec["objective"] = sr.relaxation.objective;
      rec["iterations"] = sr.relaxation.iterations;
      out.projection = sr.projection.basis();
      break;
    }
    case Task::Bench: {
      const RobustnessBudget budget(q, need(c.kappa, d.kappa, "kappa"));
      auto tb = Clock::now();
      const PcaResult fro = robust_pca_frobenius(at, c.rank, budget, params);
      out.timing["frobenius_s"] = seconds_since(tb);
      tb = Clock::now();
      const PcaResult spec = robust_pca_spectral(at, c.rank, budget, params);
      out.timing["spectral_s"] = seconds_since(tb);
      rec["frobenius_objective"] = fro.relaxation.objective;
      rec["frobenius_iterations"] = fro.relaxation.iterations;
      rec["spectral_objective"] = spec.relaxation.objective;
      rec["spectral_iterations"] = spec.relaxation.iterations;
      break;
    }
  }
  out.timing["solve_s"] = seconds_since(t1);
  return out;
}

json aggregate(const std::vector<TrialResult>& trials) {
  std::map<std::string, std::vector<double>> nums;
  std::map<std::string, std::vector<double>> flags;
  std::map<std::string, std::map<std::string, int>> words;
  for (const auto& t : trials) {
    for (const auto& [key, v] : t.record.items()) {
      if (key == "trial" || key == "seed") continue;
      if (v.is_boolean()) flags[key].push_back(v.get<bool>() ? 1.0 : 0.0);
      else if (v.is_number()) nums[key].push_back(v.get<double>());
      else if (v.is_string()) ++words[key][v.get<std::string>()];
    }
  }
  json agg = json::object();
  for (const auto& [key, xs] : nums) {
    double sum = 0.0, lo = xs.front(), hi = xs.front();
    for (double x : xs) {
      sum += x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    agg[key] = {{"mean", sum / static_cast<double>(xs.size())}, {"min", lo}, {"max", hi}, {"count", xs.size()}};
  }
  for (const auto& [key, xs] : flags) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    agg[key] = {{"rate", sum / static_cast<double>(xs.size())}, {"count", xs.size()}};
  }
  for (const auto& [key, counts] : words) agg[key] = counts;
  return agg;
}

std::string long_csv(const std::vector<TrialResult>& trials) {
  std::ostringstream os;
  os.precision(17);
  os << "trial,metric,value\n";
  for (const auto& t : trials) {
    const int trial = t.record["trial"].get<int>();
    for (const auto& [key, v] : t.record.items()) {
      if (key == "trial") continue;
      if (v.is_boolean()) os << trial << ',' << key << ',' << (v.get<bool>() ? 1 : 0) << '\n';
      else if (v.is_number_unsigned()) os << trial << ',' << key << ',' << v.get<std::uint64_t>() << '\n';
      else if (v.is_number_integer()) os << trial << ',' << key << ',' << v.get<long long>() << '\n';
      else if (v.is_number()) os << trial << ',' << key << ',' << v.get<double>() << '\n';
    }
  }
  return os.str();
}

}  // namespace robsub::cli
