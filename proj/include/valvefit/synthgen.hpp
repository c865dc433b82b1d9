#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "valvefit/valve_core.hpp"

namespace valvefit {

enum class StrokeProfile {
  triangular,   // n_reversals + 1 linear ramps between the range ends
  random_walk,  // random-length steps, direction flips with reversal_probability
};

[[nodiscard]] std::string_view to_string(StrokeProfile profile) noexcept;
// Accepts "triangular", "random" and "random_walk".
[[nodiscard]] StrokeProfile parse_stroke_profile(std::string_view name);

struct TrajectoryConfig {
  std::size_t n_samples = 200;
  StrokeProfile profile = StrokeProfile::triangular;
  double opening_lo = 0.0;
  double opening_hi = 1.0;
  std::size_t n_reversals = 1;         // triangular only
  double reversal_probability = 0.05;  // random_walk only
  ValveParams params{1.0, 0.0};
  double noise_std = 0.0;  // additive Gaussian noise on flow
  bool shuffle = false;
  std::uint64_t seed = 0;

  // Throws Errc::invalid_config.
  void validate() const;
};

// Synthetic trajectory with true_modes populated.  Openings never repeat
// between consecutive samples; a sample's mode is the direction of the step
// that reached it (up -> 1, down -> 0).  With shuffle the samples are
// permuted and the permutation is discarded.
//
// Random streams: 0 = stroke profile, 1 = flow noise, 2 = shuffle.
[[nodiscard]] Dataset generate(const TrajectoryConfig& cfg);

// Noise-free flows forward_flow(params, opening, true_mode) for each sample.
[[nodiscard]] std::vector<double> clean_flows(const Dataset& ds, const ValveParams& params);

// 10*log10(var(clean) / noise_std^2) using the population variance.
// Returns +inf for noise_std == 0; throws Errc::constant_signal for zero
// variance and Errc::invalid_config for negative noise_std or < 2 samples.
[[nodiscard]] double measure_snr(std::span<const double> clean_flows, double noise_std);

}  // namespace valvefit
