#include "valvefit/synthgen.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "valvefit/random.hpp"

namespace valvefit {

namespace {

constexpr std::uint64_t kProfileStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kShuffleStream = 2;

// Random-walk step length as a fraction of the opening range.  The upper
// bound stays below one half so a reflected step always lands inside.
constexpr double kMinStep = 0.02;
constexpr double kMaxStep = 0.08;

struct Profile {
  std::vector<double> openings;
  std::vector<std::uint8_t> modes;
};

Profile triangular_profile(const TrajectoryConfig& cfg) {
  const std::size_t strokes = cfg.n_reversals + 1;
  const std::size_t base = cfg.n_samples / strokes;
  const std::size_t extra = cfg.n_samples % strokes;

  Profile p;
  p.openings.reserve(cfg.n_samples);
  p.modes.reserve(cfg.n_samples);
  double start = cfg.opening_lo;
  bool up = true;
  for (std::size_t s = 0; s < strokes; ++s) {
    const std::size_t steps = base + (s < extra ? 1 : 0);
    const double end = up ? cfg.opening_hi : cfg.opening_lo;
    for (std::size_t i = 1; i <= steps; ++i) {
      p.openings.push_back(start + (end - start) * static_cast<double>(i) / static_cast<double>(steps));
      p.modes.push_back(up ? 1 : 0);
    }
    start = end;
    up = !up;
  }
  return p;
}

Profile random_walk_profile(const TrajectoryConfig& cfg, Rng& rng) {
  const double span = cfg.opening_hi - cfg.opening_lo;
  const std::size_t force_at = cfg.n_samples / 2;

  Profile p;
  p.openings.reserve(cfg.n_samples);
  p.modes.reserve(cfg.n_samples);
  double pos = rng.uniform(cfg.opening_lo, cfg.opening_hi);
  bool up = true;
  bool reversed = false;
  for (std::size_t k = 0; k < cfg.n_samples; ++k) {
    const double step = span * rng.uniform(kMinStep, kMaxStep);
    bool flip = k > 0 && rng.uniform() < cfg.reversal_probability;
    // Guarantee both strokes appear.
    if (k >= force_at && !reversed) flip = true;
    const double target = pos + (up != flip ? step : -step);
    if (target > cfg.opening_hi || target < cfg.opening_lo) flip = !flip;
    if (flip) {
      up = !up;
      reversed = reversed || k > 0;
    }
    pos += up ? step : -step;
    p.openings.push_back(pos);
    p.modes.push_back(up ? 1 : 0);
  }
  return p;
}

}  // namespace

std::string_view to_string(StrokeProfile profile) noexcept {
  switch (profile) {
    case StrokeProfile::triangular: return "triangular";
    case StrokeProfile::random_walk: return "random";
  }
  return "unknown";
}

StrokeProfile parse_stroke_profile(std::string_view name) {
  if (name == "triangular") return StrokeProfile::triangular;
  if (name == "random" || name == "random_walk") return StrokeProfile::random_walk;
  throw Error(Errc::invalid_config, "unknown stroke profile '" + std::string(name) + "'");
}

void TrajectoryConfig::validate() const {
  if (n_samples < 4) throw Error(Errc::invalid_config, "n_samples must be at least 4");
  if (!(opening_lo >= 0.0 && opening_hi <= 1.0 && opening_lo < opening_hi))
    throw Error(Errc::invalid_config, "opening range must satisfy 0 <= lo < hi <= 1");
  if (!(noise_std >= 0.0) || !std::isfinite(noise_std))
    throw Error(Errc::invalid_config, "noise_std must be finite and non-negative");
  if (profile == StrokeProfile::triangular && (n_reversals < 1 || n_reversals + 1 > n_samples))
    throw Error(Errc::invalid_config, "triangular profile needs 1 <= n_reversals < n_samples");
  if (profile == StrokeProfile::random_walk && !(reversal_probability >= 0.0 && reversal_probability <= 1.0))
    throw Error(Errc::invalid_config, "reversal_probability must lie in [0,1]");
}

Dataset generate(const TrajectoryConfig& cfg) {
  cfg.validate();

  Rng profile_rng(cfg.seed, kProfileStream);
  Profile p = cfg.profile == StrokeProfile::triangular ? triangular_profile(cfg) : random_walk_profile(cfg, profile_rng);

  Rng noise_rng(cfg.seed, kNoiseStream);
  std::vector<double> flows(p.openings.size());
  for (std::size_t i = 0; i < flows.size(); ++i) {
    flows[i] = forward_flow(cfg.params, p.openings[i], static_cast<Stroke>(p.modes[i]));
    if (cfg.noise_std > 0.0) flows[i] += cfg.noise_std * noise_rng.normal();
  }

  Dataset ds = Dataset::from_columns(p.openings, flows, true, ModeLabels(std::move(p.modes)));
  if (!cfg.shuffle) return ds;

  // Fisher-Yates with the portable bounded draw.
  Rng shuffle_rng(cfg.seed, kShuffleStream);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[shuffle_rng.below(i + 1)]);
  return ds.permuted(order);
}

std::vector<double> clean_flows(const Dataset& ds, const ValveParams& params) {
  if (!ds.true_modes()) throw Error(Errc::invalid_dataset, "clean flows need ground-truth modes");
  std::vector<double> out(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) out[i] = forward_flow(params, ds[i].opening, ds.true_modes()->stroke(i));
  return out;
}

double measure_snr(std::span<const double> clean, double noise_std) {
  if (clean.size() < 2) throw Error(Errc::invalid_config, "SNR needs at least two samples");
  if (!(noise_std >= 0.0)) throw Error(Errc::invalid_config, "noise_std must be non-negative");
  const double n = static_cast<double>(clean.size());
  const double mean = std::accumulate(clean.begin(), clean.end(), 0.0) / n;
  double var = 0.0;
  for (double q : clean) var += (q - mean) * (q - mean);
  var /= n;
  if (var == 0.0) throw Error(Errc::constant_signal, "clean flow signal has zero variance");
  if (noise_std == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(var / (noise_std * noise_std));
}

}  // namespace valvefit
