#pragma once
//
// Seeded Monte-Carlo comparison of fit_pipeline against the two baselines
// across a grid of flow-channel SNR levels.
//

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "valvefit/estimator.hpp"
#include "valvefit/synthgen.hpp"

namespace valvefit {

enum class Method { pipeline, naive, residual_kmeans };

inline constexpr std::array<Method, 3> kAllMethods{Method::pipeline, Method::naive, Method::residual_kmeans};

[[nodiscard]] std::string_view to_string(Method m) noexcept;

struct EvalConfig {
  std::vector<double> snr_grid_db;  // +inf means noiseless
  std::size_t trials_per_point = 1;
  TrajectoryConfig trajectory;  // noise_std and seed are overridden per trial
  std::uint64_t seed = 0;
  FitConfig fit;
  std::size_t threads = 1;  // 0 = hardware concurrency

  void validate() const;
};

struct EvalRow {
  double snr_db = 0.0;
  Method method = Method::pipeline;
  std::size_t trials = 0;
  std::size_t n_failures = 0;
  // Mean and sample standard deviation over trials that did not fail.
  double misclassification_mean = 0.0;
  double misclassification_std = 0.0;
  double alpha_rel_err_mean = 0.0;
  double alpha_rel_err_std = 0.0;
  double beta_abs_err_mean = 0.0;
  double beta_abs_err_std = 0.0;
};

// Noise level giving the requested SNR on a noiseless pilot run of the
// template (seeded with `seed`).  +inf maps to 0.
[[nodiscard]] double noise_std_for_snr(const TrajectoryConfig& tmpl, std::uint64_t seed, double snr_db);

// Per-trial seed: base ^ splitmix64(snr_index << 32 | trial_index).  The
// same seed, and therefore the same dataset, is used for every method.
[[nodiscard]] std::uint64_t trial_seed(std::uint64_t base, std::size_t snr_index, std::size_t trial_index) noexcept;

// The dataset seen by all methods in one trial.
[[nodiscard]] Dataset trial_dataset(const EvalConfig& cfg, std::size_t snr_index, std::size_t trial_index);

// Rows in (snr, method) order with methods as in kAllMethods.  Trials may
// run on several threads; the reduction order is fixed, so the output does
// not depend on scheduling.  Throws Errc::invalid_config.
[[nodiscard]] std::vector<EvalRow> run_eval(const EvalConfig& cfg);

// Runs one method on a dataset; throws EstimationError.
[[nodiscard]] FitResult run_method(Method m, const Dataset& ds, const FitConfig& cfg);

}  // namespace valvefit
