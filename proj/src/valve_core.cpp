#include "valvefit/valve_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace valvefit {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::empty_dataset: return "EmptyDataset";
    case Errc::too_few_samples: return "TooFewSamples";
    case Errc::invalid_dataset: return "InvalidDataset";
    case Errc::not_time_ordered: return "NotTimeOrdered";
    case Errc::non_finite: return "NonFinite";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::degenerate_spread: return "DegenerateSpread";
    case Errc::single_mode_detected: return "SingleModeDetected";
    case Errc::ill_conditioned: return "IllConditioned";
    case Errc::non_positive_gain: return "NonPositiveGain";
    case Errc::all_openings_zero: return "AllOpeningsZero";
    case Errc::constant_signal: return "ConstantSignal";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

ValveParams::ValveParams(double alpha, double beta) : alpha_(alpha), beta_(beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta))
    throw Error(Errc::non_finite, "valve parameters must be finite");
  if (!(alpha > 0.0))
    throw Error(Errc::non_positive_gain, "flow gain alpha must be positive, got " + std::to_string(alpha));
}

double ValveParams::hysteresis_width() const noexcept { return std::abs(beta_) / alpha_; }

// ---------------------------------------------------------------------------

ModeLabels::ModeLabels(std::vector<std::uint8_t> labels) : labels_(std::move(labels)) {
  for (auto v : labels_)
    if (v > 1) throw Error(Errc::invalid_dataset, "mode labels must be 0 or 1");
}

ModeLabels ModeLabels::constant(std::size_t n, Stroke stroke) {
  return ModeLabels(std::vector<std::uint8_t>(n, static_cast<std::uint8_t>(stroke)));
}

ModeLabels ModeLabels::threshold(const Eigen::VectorXd& h, double threshold, double tie_tol) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(h.size()));
  for (Eigen::Index i = 0; i < h.size(); ++i) out[static_cast<std::size_t>(i)] = h[i] >= threshold - tie_tol ? 1 : 0;
  return ModeLabels(std::move(out));
}

std::size_t ModeLabels::count_up() const noexcept {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), std::uint8_t{1}));
}

bool ModeLabels::single_mode() const noexcept {
  const auto up = count_up();
  return up == 0 || up == labels_.size();
}

ModeLabels ModeLabels::complement() const {
  auto out = labels_;
  for (auto& v : out) v = static_cast<std::uint8_t>(1 - v);
  return ModeLabels(std::move(out));
}

ModeLabels ModeLabels::permuted(std::span<const std::size_t> order) const {
  if (order.size() != labels_.size()) throw Error(Errc::dimension_mismatch, "permutation length mismatch");
  std::vector<std::uint8_t> out(labels_.size());
  for (std::size_t k = 0; k < order.size(); ++k) out[k] = labels_.at(order[k]);
  return ModeLabels(std::move(out));
}

Eigen::VectorXd ModeLabels::as_vector() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(labels_.size()));
  for (std::size_t i = 0; i < labels_.size(); ++i) v[static_cast<Eigen::Index>(i)] = labels_[i];
  return v;
}

// ---------------------------------------------------------------------------

Dataset::Dataset(std::vector<Measurement> samples, bool time_ordered, std::optional<ModeLabels> true_modes)
    : samples_(std::move(samples)), time_ordered_(time_ordered), true_modes_(std::move(true_modes)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.index != i + 1)
      throw Error(Errc::invalid_dataset, "sample indices must be 1..N consecutive (sample " +
                                             std::to_string(i + 1) + " has index " + std::to_string(s.index) + ")");
    if (!std::isfinite(s.opening) || !std::isfinite(s.flow))
      throw Error(Errc::non_finite, "non-finite measurement at index " + std::to_string(s.index));
  }
  if (true_modes_ && true_modes_->size() != samples_.size())
    throw Error(Errc::dimension_mismatch, "true_modes length does not match sample count");
}

Dataset Dataset::from_columns(std::span<const double> openings, std::span<const double> flows, bool time_ordered,
                              std::optional<ModeLabels> true_modes) {
  if (openings.size() != flows.size()) throw Error(Errc::dimension_mismatch, "opening/flow column length mismatch");
  std::vector<Measurement> samples(openings.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = {openings[i], flows[i], i + 1};
  return Dataset(std::move(samples), time_ordered, std::move(true_modes));
}

Eigen::VectorXd Dataset::openings() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(samples_.size()));
  for (std::size_t i = 0; i < samples_.size(); ++i) v[static_cast<Eigen::Index>(i)] = samples_[i].opening;
  return v;
}

Eigen::VectorXd Dataset::flows() const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(samples_.size()));
  for (std::size_t i = 0; i < samples_.size(); ++i) v[static_cast<Eigen::Index>(i)] = samples_[i].flow;
  return v;
}

bool Dataset::has_out_of_range_openings() const noexcept {
  return std::any_of(samples_.begin(), samples_.end(),
                     [](const Measurement& m) { return m.opening < 0.0 || m.opening > 1.0; });
}

Dataset Dataset::permuted(std::span<const std::size_t> order) const {
  if (order.size() != samples_.size()) throw Error(Errc::dimension_mismatch, "permutation length mismatch");
  std::vector<Measurement> out(samples_.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out[k] = samples_.at(order[k]);
    out[k].index = k + 1;
  }
  std::optional<ModeLabels> modes;
  if (true_modes_) modes = true_modes_->permuted(order);
  return Dataset(std::move(out), false, std::move(modes));
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.time_ordered_ != b.time_ordered_ || a.true_modes_ != b.true_modes_ || a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.samples_[i];
    const auto& y = b.samples_[i];
    if (x.index != y.index || x.opening != y.opening || x.flow != y.flow) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

double forward_flow(const ValveParams& params, double opening, Stroke mode) noexcept {
  return params.alpha() * opening + params.beta() * static_cast<double>(mode);
}

Eigen::Matrix2Xd build_data_matrix(const Dataset& ds) {
  if (ds.size() == 0) throw Error(Errc::empty_dataset, "cannot build a data matrix from an empty dataset");
  Eigen::Matrix2Xd z(2, static_cast<Eigen::Index>(ds.size()));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    z(0, static_cast<Eigen::Index>(i)) = ds[i].opening;
    z(1, static_cast<Eigen::Index>(i)) = ds[i].flow;
  }
  return z;
}

SwitchEpochs switching_epochs(const ModeLabels& labels, const Dataset& ds) {
  if (!ds.time_ordered())
    throw Error(Errc::not_time_ordered, "switching epochs are undefined for data in unknown order");
  if (labels.size() != ds.size()) throw Error(Errc::dimension_mismatch, "label count does not match dataset size");
  SwitchEpochs out;
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] != labels[i - 1]) out.epochs.push_back(i + 1);
  return out;
}

}  // namespace valvefit
