#include "valvefit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>

#include "valvefit/random.hpp"

namespace valvefit {

namespace {

struct TrialOutcome {
  std::array<std::optional<Metrics>, kAllMethods.size()> per_method;
};

std::pair<double, double> mean_and_std(const std::vector<double>& xs) {
  if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

TrialOutcome run_trial(const EvalConfig& cfg, const std::vector<double>& noise, std::size_t snr_index,
                       std::size_t trial_index) {
  TrajectoryConfig tc = cfg.trajectory;
  tc.noise_std = noise[snr_index];
  tc.seed = trial_seed(cfg.seed, snr_index, trial_index);
  const Dataset ds = generate(tc);
  Truth truth{tc.params, *ds.true_modes(), std::nullopt};
  if (ds.time_ordered()) truth.epochs = switching_epochs(truth.labels, ds);

  TrialOutcome out;
  for (std::size_t k = 0; k < kAllMethods.size(); ++k) {
    try {
      out.per_method[k] = metrics(run_method(kAllMethods[k], ds, cfg.fit), truth);
    } catch (const Error&) {
      // counted as a failure
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::pipeline: return "pipeline";
    case Method::naive: return "naive";
    case Method::residual_kmeans: return "kmeans";
  }
  return "unknown";
}

void EvalConfig::validate() const {
  if (snr_grid_db.empty()) throw Error(Errc::invalid_config, "SNR grid must not be empty");
  if (trials_per_point < 1) throw Error(Errc::invalid_config, "trials_per_point must be at least 1");
  for (double s : snr_grid_db)
    if (std::isnan(s) || s == -std::numeric_limits<double>::infinity())
      throw Error(Errc::invalid_config, "SNR values must be finite or +inf");
  trajectory.validate();
  fit.validate();
}

double noise_std_for_snr(const TrajectoryConfig& tmpl, std::uint64_t seed, double snr_db) {
  if (snr_db == std::numeric_limits<double>::infinity()) return 0.0;
  TrajectoryConfig pilot = tmpl;
  pilot.noise_std = 0.0;
  pilot.shuffle = false;
  pilot.seed = seed;
  const Dataset ds = generate(pilot);
  const std::vector<double> clean = clean_flows(ds, pilot.params);
  // measure_snr at unit noise gives 10 log10(var).
  const double var_db = measure_snr(clean, 1.0);
  return std::sqrt(std::pow(10.0, (var_db - snr_db) / 10.0));
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t snr_index, std::size_t trial_index) noexcept {
  return base ^ splitmix64((static_cast<std::uint64_t>(snr_index) << 32) | static_cast<std::uint64_t>(trial_index));
}

Dataset trial_dataset(const EvalConfig& cfg, std::size_t snr_index, std::size_t trial_index) {
  TrajectoryConfig tc = cfg.trajectory;
  tc.noise_std = noise_std_for_snr(cfg.trajectory, cfg.seed, cfg.snr_grid_db.at(snr_index));
  tc.seed = trial_seed(cfg.seed, snr_index, trial_index);
  return generate(tc);
}

FitResult run_method(Method m, const Dataset& ds, const FitConfig& cfg) {
  switch (m) {
    case Method::pipeline: return fit_pipeline(ds, cfg);
    case Method::naive: return baseline_naive(ds);
    case Method::residual_kmeans: return baseline_residual_kmeans(ds, cfg);
  }
  throw Error(Errc::invalid_config, "unknown method");
}

std::vector<EvalRow> run_eval(const EvalConfig& cfg) {
  cfg.validate();
  const std::size_t n_snr = cfg.snr_grid_db.size();
  const std::size_t n_trials = cfg.trials_per_point;

  std::vector<double> noise(n_snr);
  for (std::size_t s = 0; s < n_snr; ++s) noise[s] = noise_std_for_snr(cfg.trajectory, cfg.seed, cfg.snr_grid_db[s]);

  // Slot (s, t) is written by exactly one worker.
  std::vector<TrialOutcome> outcomes(n_snr * n_trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < outcomes.size(); job = next++)
      outcomes[job] = run_trial(cfg, noise, job / n_trials, job % n_trials);
  };

  std::size_t n_threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  n_threads = std::min(n_threads, outcomes.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  std::vector<EvalRow> rows;
  rows.reserve(n_snr * kAllMethods.size());
  for (std::size_t s = 0; s < n_snr; ++s) {
    for (std::size_t k = 0; k < kAllMethods.size(); ++k) {
      std::vector<double> mis, aerr, berr;
      std::size_t failures = 0;
      for (std::size_t t = 0; t < n_trials; ++t) {
        const auto& m = outcomes[s * n_trials + t].per_method[k];
        if (!m) {
          ++failures;
          continue;
        }
        mis.push_back(m->misclassification_ratio);
        aerr.push_back(m->alpha_rel_err);
        berr.push_back(m->beta_abs_err);
      }
      EvalRow row;
      row.snr_db = cfg.snr_grid_db[s];
      row.method = kAllMethods[k];
      row.trials = n_trials;
      row.n_failures = failures;
      std::tie(row.misclassification_mean, row.misclassification_std) = mean_and_std(mis);
      std::tie(row.alpha_rel_err_mean, row.alpha_rel_err_std) = mean_and_std(aerr);
      std::tie(row.beta_abs_err_mean, row.beta_abs_err_std) = mean_and_std(berr);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace valvefit
