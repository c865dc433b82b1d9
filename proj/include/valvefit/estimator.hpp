#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "valvefit/valve_core.hpp"

namespace valvefit {

enum class Warning {
  OutOfRangeOpenings,
  NoHysteresisDetected,
  SingleModeDetected,
  AmbiguousModeIdentity,  // both label identities gave the same SSR
};

[[nodiscard]] std::string_view to_string(Warning w) noexcept;
[[nodiscard]] std::optional<Warning> parse_warning(std::string_view name) noexcept;

// Least-squares fit of q = alpha * opening + beta * label.
struct LabeledFit {
  ValveParams params;
  double ssr = 0.0;
  double residual_rms = 0.0;  // sqrt(ssr / N)
  Eigen::Matrix2d gram;       // [[sum mu^2, sum_up mu], [sum_up mu, N_up]]
  double beta_std_error = 0.0;  // residual_rms * sqrt((G^-1)_22)
};

// Solves the 2 x 2 normal equations.  Throws Errc::single_mode_detected if
// either mode is empty, Errc::ill_conditioned if cond(G) > max_condition,
// Errc::non_positive_gain if the fitted slope is not positive.
[[nodiscard]] LabeledFit ls_fit_labeled(const Eigen::VectorXd& openings, const Eigen::VectorXd& flows,
                                        const ModeLabels& labels, double max_condition = 1e12);
[[nodiscard]] LabeledFit ls_fit_labeled(const Dataset& ds, const ModeLabels& labels, double max_condition = 1e12);

struct IdentityAssignment {
  ModeLabels labels;
  bool tied = false;
};

// Chooses which cluster is the up-stroke.  The down-stroke line is anchored
// at the origin, so only one of the two identities fits the model; the one
// with the smaller SSR wins.  On an exact tie the identity with fewer
// up-stroke samples is returned and `tied` is set.
[[nodiscard]] IdentityAssignment assign_mode_identity(const Eigen::VectorXd& openings, const Eigen::VectorXd& flows,
                                                      const ModeLabels& clustering, double max_condition = 1e12);
[[nodiscard]] IdentityAssignment assign_mode_identity(const Dataset& ds, const ModeLabels& clustering,
                                                      double max_condition = 1e12);

struct FitConfig {
  double tol = 1e-10;          // tie tolerance of the 0.5 threshold
  std::size_t max_iter = 100;  // alternating-projection updates
  double rank_threshold = 1e-8;    // sigma[1] / sigma[0] below this => one line
  double max_condition = 1e12;     // Gram condition-number limit
  double beta_se_multiplier = 3.0;  // |beta| below this many standard errors => no hysteresis
  // |beta| below (beta_separation + beta_separation_small_n / sqrt(N))
  // residual RMS => no hysteresis.  Labels fitted to pure noise already
  // split it into two groups with |beta| / rms around 2.4 at N = 200 and
  // more for small N; the default stays above 99.9 % of those values for
  // N >= 30.
  double beta_separation = 2.5;
  double beta_separation_small_n = 14.0;

  [[nodiscard]] double separation_threshold(std::size_t n) const;

  void validate() const;
};

struct FitResult {
  ValveParams params{1.0, 0.0};
  ModeLabels labels;
  std::optional<SwitchEpochs> epochs;  // present iff the input was time-ordered
  double residual_rms = 0.0;
  double ssr = 0.0;
  std::array<double, 2> sigma{0.0, 0.0};  // singular values of the row-normalised data matrix
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<Warning> warnings;

  [[nodiscard]] bool has_warning(Warning w) const noexcept;
};

// Raised by the fitting entry points.  Carries whatever diagnostics were
// available when the failure happened.
class EstimationError : public Error {
 public:
  EstimationError(const Error& cause, std::array<double, 2> sigma, std::vector<Warning> warnings)
      : Error(cause.code(), cause.what()), sigma_(sigma), warnings_(std::move(warnings)) {}

  [[nodiscard]] const std::array<double, 2>& sigma() const noexcept { return sigma_; }
  [[nodiscard]] const std::vector<Warning>& warnings() const noexcept { return warnings_; }

 private:
  std::array<double, 2> sigma_;
  std::vector<Warning> warnings_;
};

// Full identification: row-normalised SVD, rank check, TLS-based initial
// labels, row-space refinement, mode identity, least squares on the raw
// data, switching epochs for time-ordered input.  N >= 4.
//
// Outcomes short of a two-mode fit are reported through warnings:
//  - rank-1 data (one line through the origin): NoHysteresisDetected and
//    SingleModeDetected, slope-only fit, all labels 0;
//  - all samples on one offset line: SingleModeDetected, labels all 1,
//    slope + offset fit;
//  - a fitted offset indistinguishable from noise: NoHysteresisDetected,
//    parameters from the slope-only fit, labels kept.
// Throws EstimationError.
[[nodiscard]] FitResult fit_pipeline(const Dataset& ds, const FitConfig& cfg = {});

// One line through the origin, beta = 0, all labels 0.  N >= 2.
// Throws EstimationError (Errc::all_openings_zero).
[[nodiscard]] FitResult baseline_naive(const Dataset& ds);

// Residuals from the naive line, 1-D two-means, mode identity, least
// squares.  No subspace refinement.  Throws EstimationError.
[[nodiscard]] FitResult baseline_residual_kmeans(const Dataset& ds, const FitConfig& cfg = {});

struct Truth {
  ValveParams params;
  ModeLabels labels;
  std::optional<SwitchEpochs> epochs;
};

struct Metrics {
  double misclassification_ratio = 0.0;
  double alpha_rel_err = 0.0;
  double beta_abs_err = 0.0;
  std::optional<std::size_t> epoch_set_distance;  // when both sides have epochs
};

// No label-swap minimisation: mode identity is pinned by the model.
[[nodiscard]] Metrics metrics(const FitResult& fit, const Truth& truth);

}  // namespace valvefit
