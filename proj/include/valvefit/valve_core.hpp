#pragma once
//
// Domain types and the forward model of a linear control valve with
// hysteresis.  The valve switches between two affine lines:
//
//   down-stroke (mode 0):  q = alpha * opening
//   up-stroke   (mode 1):  q = alpha * opening + beta
//
// i.e. q is the second row of A * [opening; mode] with A = [[1, 0], [alpha, beta]].
//

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "valvefit/error.hpp"

namespace valvefit {

enum class Stroke : std::uint8_t { down = 0, up = 1 };

struct Measurement {
  double opening = 0.0;  // fraction of full travel, nominally in [0,1]
  double flow = 0.0;
  std::size_t index = 0;  // 1-based sample ordinal
};

class ValveParams {
 public:
  // Throws Errc::non_positive_gain unless alpha > 0, Errc::non_finite on NaN/inf.
  ValveParams(double alpha, double beta);

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double beta() const noexcept { return beta_; }
  // |beta| / alpha, in opening units.
  [[nodiscard]] double hysteresis_width() const noexcept;
  // C_v readout.  The slope-to-C_v factor depends on pressure drop and fluid
  // density, which are not estimated, so the caller supplies it.
  [[nodiscard]] double flow_coefficient(double scale) const noexcept { return alpha_ * scale; }

  friend bool operator==(const ValveParams&, const ValveParams&) = default;

 private:
  double alpha_;
  double beta_;
};

// Per-sample stroke assignment, values in {0,1}.
class ModeLabels {
 public:
  ModeLabels() = default;
  explicit ModeLabels(std::vector<std::uint8_t> labels);
  static ModeLabels constant(std::size_t n, Stroke stroke);
  // 1 where h >= threshold - tie_tol, else 0.
  static ModeLabels threshold(const Eigen::VectorXd& h, double threshold = 0.5, double tie_tol = 0.0);

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] std::uint8_t operator[](std::size_t i) const { return labels_[i]; }
  [[nodiscard]] Stroke stroke(std::size_t i) const { return static_cast<Stroke>(labels_[i]); }
  [[nodiscard]] const std::vector<std::uint8_t>& values() const noexcept { return labels_; }

  [[nodiscard]] std::size_t count_up() const noexcept;
  [[nodiscard]] bool single_mode() const noexcept;
  [[nodiscard]] ModeLabels complement() const;
  [[nodiscard]] ModeLabels permuted(std::span<const std::size_t> order) const;
  [[nodiscard]] Eigen::VectorXd as_vector() const;

  friend bool operator==(const ModeLabels&, const ModeLabels&) = default;

 private:
  std::vector<std::uint8_t> labels_;
};

struct SwitchEpochs {
  std::vector<std::size_t> epochs;  // ascending, 1-based, each in [2, N]

  friend bool operator==(const SwitchEpochs&, const SwitchEpochs&) = default;
};

class Dataset {
 public:
  // Validates: indices 1..N consecutive, finite values, true_modes length == N.
  Dataset(std::vector<Measurement> samples, bool time_ordered,
          std::optional<ModeLabels> true_modes = std::nullopt);

  // Assigns indices 1..N in column order.
  static Dataset from_columns(std::span<const double> openings, std::span<const double> flows,
                              bool time_ordered, std::optional<ModeLabels> true_modes = std::nullopt);

  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] const std::vector<Measurement>& samples() const noexcept { return samples_; }
  [[nodiscard]] const Measurement& operator[](std::size_t i) const { return samples_[i]; }
  [[nodiscard]] bool time_ordered() const noexcept { return time_ordered_; }
  [[nodiscard]] const std::optional<ModeLabels>& true_modes() const noexcept { return true_modes_; }

  [[nodiscard]] Eigen::VectorXd openings() const;
  [[nodiscard]] Eigen::VectorXd flows() const;
  // True if any opening falls outside [0,1].
  [[nodiscard]] bool has_out_of_range_openings() const noexcept;

  // Column permutation: sample k of the result is sample order[k] of this one.
  // The result is marked not time-ordered and re-indexed 1..N.
  [[nodiscard]] Dataset permuted(std::span<const std::size_t> order) const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::vector<Measurement> samples_;
  bool time_ordered_;
  std::optional<ModeLabels> true_modes_;
};

// alpha * opening + beta * mode.  No clipping: up-stroke flow near zero
// opening may come out negative.
[[nodiscard]] double forward_flow(const ValveParams& params, double opening, Stroke mode) noexcept;

// 2 x N matrix: row 0 = openings, row 1 = flows, columns in sample order.
[[nodiscard]] Eigen::Matrix2Xd build_data_matrix(const Dataset& ds);

// Indices n >= 2 (1-based) with labels[n] != labels[n-1].
// Throws Errc::not_time_ordered for shuffled data, Errc::dimension_mismatch on length mismatch.
[[nodiscard]] SwitchEpochs switching_epochs(const ModeLabels& labels, const Dataset& ds);

}  // namespace valvefit
