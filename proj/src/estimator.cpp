#include "valvefit/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "valvefit/kmeans1d.hpp"
#include "valvefit/subspace.hpp"

namespace valvefit {

namespace {

struct NormalSolution {
  double alpha;
  double beta;
  double ssr;
  Eigen::Matrix2d gram;
  Eigen::Matrix2d gram_inv;
};

// Spectral condition number of a symmetric 2 x 2 matrix.
double condition_2x2(const Eigen::Matrix2d& g) {
  const double half_trace = 0.5 * (g(0, 0) + g(1, 1));
  const double half_gap = std::hypot(0.5 * (g(0, 0) - g(1, 1)), g(0, 1));
  const double lmax = half_trace + half_gap;
  const double lmin = half_trace - half_gap;
  if (!(lmin > 0.0)) return std::numeric_limits<double>::infinity();
  return lmax / lmin;
}

// Normal equations for q = alpha * mu + beta * indicator, with no check on
// the indicator's content.
NormalSolution solve_normal_equations(const Eigen::VectorXd& mu, const Eigen::VectorXd& q, const Eigen::VectorXd& ind,
                                      double max_condition) {
  Eigen::Matrix2d g;
  g(0, 0) = mu.squaredNorm();
  g(0, 1) = g(1, 0) = mu.dot(ind);
  g(1, 1) = ind.sum();
  if (condition_2x2(g) > max_condition)
    throw Error(Errc::ill_conditioned, "Gram matrix condition number exceeds " + std::to_string(max_condition));

  const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  Eigen::Matrix2d inv;
  inv << g(1, 1) / det, -g(0, 1) / det, -g(1, 0) / det, g(0, 0) / det;
  const Eigen::Vector2d rhs(mu.dot(q), ind.dot(q));
  const Eigen::Vector2d sol = inv * rhs;
  const double ssr = (q - sol[0] * mu - sol[1] * ind).squaredNorm();
  return {sol[0], sol[1], ssr, g, inv};
}

void check_lengths(const Eigen::VectorXd& openings, const Eigen::VectorXd& flows, std::size_t n_labels) {
  if (openings.size() != flows.size() || static_cast<std::size_t>(openings.size()) != n_labels)
    throw Error(Errc::dimension_mismatch, "opening, flow and label lengths differ");
}

struct OriginLine {
  double alpha;
  double ssr;
};

OriginLine fit_origin_line(const Eigen::VectorXd& mu, const Eigen::VectorXd& q) {
  const double mm = mu.squaredNorm();
  if (mm == 0.0) throw Error(Errc::all_openings_zero, "all openings are zero; slope is unidentifiable");
  const double alpha = mu.dot(q) / mm;
  return {alpha, (q - alpha * mu).squaredNorm()};
}

std::array<double, 2> normalized_singular_values(const Eigen::Matrix2Xd& z) {
  if (z.cols() < 2 || !z.allFinite()) return {0.0, 0.0};
  return thin_svd2(normalize_rows(z).z).sigma;
}

void add_warning(std::vector<Warning>& ws, Warning w) {
  if (std::find(ws.begin(), ws.end(), w) == ws.end()) ws.push_back(w);
}

std::optional<SwitchEpochs> epochs_for(const ModeLabels& labels, const Dataset& ds) {
  if (!ds.time_ordered()) return std::nullopt;
  return switching_epochs(labels, ds);
}

FitResult origin_line_result(const Dataset& ds, const Eigen::VectorXd& mu, const Eigen::VectorXd& q) {
  const OriginLine line = fit_origin_line(mu, q);
  FitResult out;
  out.params = ValveParams(line.alpha, 0.0);
  out.labels = ModeLabels::constant(ds.size(), Stroke::down);
  out.epochs = epochs_for(out.labels, ds);
  out.ssr = line.ssr;
  out.residual_rms = std::sqrt(line.ssr / static_cast<double>(ds.size()));
  out.converged = true;
  return out;
}

}  // namespace

std::string_view to_string(Warning w) noexcept {
  switch (w) {
    case Warning::OutOfRangeOpenings: return "OutOfRangeOpenings";
    case Warning::NoHysteresisDetected: return "NoHysteresisDetected";
    case Warning::SingleModeDetected: return "SingleModeDetected";
    case Warning::AmbiguousModeIdentity: return "AmbiguousModeIdentity";
  }
  return "Unknown";
}

std::optional<Warning> parse_warning(std::string_view name) noexcept {
  for (Warning w : {Warning::OutOfRangeOpenings, Warning::NoHysteresisDetected, Warning::SingleModeDetected,
                    Warning::AmbiguousModeIdentity})
    if (to_string(w) == name) return w;
  return std::nullopt;
}

bool FitResult::has_warning(Warning w) const noexcept {
  return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
}

void FitConfig::validate() const {
  if (!(tol > 0.0) || max_iter < 1) throw Error(Errc::invalid_config, "tol must be positive and max_iter >= 1");
  if (!(rank_threshold > 0.0) || !(max_condition > 1.0))
    throw Error(Errc::invalid_config, "rank threshold must be positive and condition limit > 1");
  if (!(beta_se_multiplier >= 0.0) || !(beta_separation >= 0.0) || !(beta_separation_small_n >= 0.0))
    throw Error(Errc::invalid_config, "hysteresis detection thresholds must be non-negative");
}

double FitConfig::separation_threshold(std::size_t n) const {
  return beta_separation + beta_separation_small_n / std::sqrt(static_cast<double>(n));
}

// ---------------------------------------------------------------------------

LabeledFit ls_fit_labeled(const Eigen::VectorXd& openings, const Eigen::VectorXd& flows, const ModeLabels& labels,
                          double max_condition) {
  check_lengths(openings, flows, labels.size());
  if (labels.single_mode())
    throw Error(Errc::single_mode_detected, "both strokes need at least one sample; offset is unidentifiable");

  const NormalSolution s = solve_normal_equations(openings, flows, labels.as_vector(), max_condition);
  LabeledFit fit{ValveParams(s.alpha, s.beta), s.ssr, 0.0, s.gram, 0.0};
  fit.residual_rms = std::sqrt(s.ssr / static_cast<double>(labels.size()));
  fit.beta_std_error = fit.residual_rms * std::sqrt(s.gram_inv(1, 1));
  return fit;
}

LabeledFit ls_fit_labeled(const Dataset& ds, const ModeLabels& labels, double max_condition) {
  return ls_fit_labeled(ds.openings(), ds.flows(), labels, max_condition);
}

IdentityAssignment assign_mode_identity(const Eigen::VectorXd& openings, const Eigen::VectorXd& flows,
                                        const ModeLabels& clustering, double max_condition) {
  check_lengths(openings, flows, clustering.size());
  if (clustering.single_mode()) throw Error(Errc::single_mode_detected, "mode identity needs two non-empty clusters");

  const ModeLabels swapped = clustering.complement();
  std::optional<double> ssr_keep, ssr_swap;
  std::optional<Error> failure;
  try {
    ssr_keep = ls_fit_labeled(openings, flows, clustering, max_condition).ssr;
  } catch (const Error& e) {
    failure = e;
  }
  try {
    ssr_swap = ls_fit_labeled(openings, flows, swapped, max_condition).ssr;
  } catch (const Error& e) {
    if (!failure) failure = e;
  }
  if (!ssr_keep && !ssr_swap) throw *failure;
  if (!ssr_swap) return {clustering, false};
  if (!ssr_keep) return {swapped, false};

  const double scale = std::max(*ssr_keep, *ssr_swap);
  if (std::abs(*ssr_keep - *ssr_swap) <= 1e-12 * scale) {
    const bool keep = clustering.count_up() <= swapped.count_up();
    return {keep ? clustering : swapped, true};
  }
  return {*ssr_keep < *ssr_swap ? clustering : swapped, false};
}

IdentityAssignment assign_mode_identity(const Dataset& ds, const ModeLabels& clustering, double max_condition) {
  return assign_mode_identity(ds.openings(), ds.flows(), clustering, max_condition);
}

// ---------------------------------------------------------------------------

FitResult fit_pipeline(const Dataset& ds, const FitConfig& cfg) {
  std::array<double, 2> sigma{0.0, 0.0};
  std::vector<Warning> warnings;
  try {
    cfg.validate();
    if (ds.size() < 4) throw Error(Errc::too_few_samples, "fitting needs at least 4 samples");
    if (ds.has_out_of_range_openings()) add_warning(warnings, Warning::OutOfRangeOpenings);

    const Eigen::VectorXd mu = ds.openings();
    const Eigen::VectorXd q = ds.flows();
    const RowScaledMatrix scaled = normalize_rows(build_data_matrix(ds));
    const SubspaceBasis basis = thin_svd2(scaled.z);
    sigma = basis.sigma;

    // One line through the origin: no offset to find.
    if (sigma[1] <= cfg.rank_threshold * sigma[0]) {
      add_warning(warnings, Warning::NoHysteresisDetected);
      add_warning(warnings, Warning::SingleModeDetected);
      FitResult out = origin_line_result(ds, mu, q);
      out.sigma = sigma;
      out.warnings = warnings;
      return out;
    }

    ModeLabels initial;
    try {
      initial = init_labels(scaled.z);
    } catch (const Error& e) {
      if (e.code() != Errc::degenerate_spread) throw;
      // Every sample sits on a single line that misses the origin.
      add_warning(warnings, Warning::SingleModeDetected);
      const NormalSolution s = solve_normal_equations(mu, q, Eigen::VectorXd::Ones(mu.size()), cfg.max_condition);
      FitResult out;
      out.params = ValveParams(s.alpha, s.beta);
      out.labels = ModeLabels::constant(ds.size(), Stroke::up);
      out.epochs = epochs_for(out.labels, ds);
      out.ssr = s.ssr;
      out.residual_rms = std::sqrt(s.ssr / static_cast<double>(ds.size()));
      out.sigma = sigma;
      out.converged = true;
      out.warnings = warnings;
      return out;
    }

    const IndicatorEstimate refined = extract_indicator(basis, initial, cfg.tol, cfg.max_iter);
    FitResult out;
    out.sigma = sigma;
    out.iterations = refined.iterations;
    out.converged = refined.converged;

    ModeLabels labels = refined.labels;
    // All-zero and all-one vectors can be fixed points too.
    if (labels.single_mode()) {
      labels = initial;
      out.converged = false;
    }
    const IdentityAssignment identity = assign_mode_identity(mu, q, labels, cfg.max_condition);
    if (identity.tied) add_warning(warnings, Warning::AmbiguousModeIdentity);
    out.labels = identity.labels;

    const LabeledFit fit = ls_fit_labeled(mu, q, out.labels, cfg.max_condition);
    const double abs_beta = std::abs(fit.params.beta());
    if (abs_beta < cfg.beta_se_multiplier * fit.beta_std_error || abs_beta < cfg.separation_threshold(ds.size()) * fit.residual_rms) {
      add_warning(warnings, Warning::NoHysteresisDetected);
      const OriginLine line = fit_origin_line(mu, q);
      out.params = ValveParams(line.alpha, 0.0);
      out.ssr = line.ssr;
    } else {
      out.params = fit.params;
      out.ssr = fit.ssr;
    }
    out.residual_rms = std::sqrt(out.ssr / static_cast<double>(ds.size()));
    out.epochs = epochs_for(out.labels, ds);
    out.warnings = warnings;
    return out;
  } catch (const EstimationError&) {
    throw;
  } catch (const Error& e) {
    throw EstimationError(e, sigma, warnings);
  }
}

FitResult baseline_naive(const Dataset& ds) {
  const std::array<double, 2> sigma = ds.size() >= 2 ? normalized_singular_values(build_data_matrix(ds))
                                                     : std::array<double, 2>{0.0, 0.0};
  try {
    if (ds.size() < 2) throw Error(Errc::too_few_samples, "naive fit needs at least 2 samples");
    FitResult out = origin_line_result(ds, ds.openings(), ds.flows());
    out.sigma = sigma;
    return out;
  } catch (const Error& e) {
    throw EstimationError(e, sigma, {});
  }
}

FitResult baseline_residual_kmeans(const Dataset& ds, const FitConfig& cfg) {
  std::array<double, 2> sigma{0.0, 0.0};
  try {
    cfg.validate();
    if (ds.size() < 4) throw Error(Errc::too_few_samples, "fitting needs at least 4 samples");
    const Eigen::VectorXd mu = ds.openings();
    const Eigen::VectorXd q = ds.flows();
    const Eigen::Matrix2Xd z = build_data_matrix(ds);
    sigma = normalized_singular_values(z);
    if (on_single_line(normalize_rows(z).z))
      throw Error(Errc::single_mode_detected, "all samples lie on one line; one mode only");

    const OriginLine line = fit_origin_line(mu, q);
    const Eigen::VectorXd r = q - line.alpha * mu;
    const std::vector<double> residuals(r.data(), r.data() + r.size());
    TwoMeans clusters;
    try {
      clusters = two_means_1d(residuals, 100, kDegenerateSpreadRel * q.cwiseAbs().maxCoeff());
    } catch (const Error& e) {
      if (e.code() != Errc::degenerate_spread) throw;
      throw Error(Errc::single_mode_detected, "residuals from the single-line fit are all equal; one mode only");
    }

    FitResult out;
    out.sigma = sigma;
    out.iterations = clusters.iterations;
    out.converged = true;
    const IdentityAssignment identity =
        assign_mode_identity(mu, q, ModeLabels(std::move(clusters.assignment)), cfg.max_condition);
    if (identity.tied) out.warnings.push_back(Warning::AmbiguousModeIdentity);
    out.labels = identity.labels;
    const LabeledFit fit = ls_fit_labeled(mu, q, out.labels, cfg.max_condition);
    out.params = fit.params;
    out.ssr = fit.ssr;
    out.residual_rms = fit.residual_rms;
    out.epochs = epochs_for(out.labels, ds);
    return out;
  } catch (const Error& e) {
    throw EstimationError(e, sigma, {});
  }
}

Metrics metrics(const FitResult& fit, const Truth& truth) {
  if (fit.labels.size() != truth.labels.size())
    throw Error(Errc::dimension_mismatch, "fitted and true label counts differ");
  Metrics m;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.labels.size(); ++i) wrong += fit.labels[i] != truth.labels[i] ? 1 : 0;
  m.misclassification_ratio =
      truth.labels.size() == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(truth.labels.size());
  m.alpha_rel_err = std::abs(fit.params.alpha() - truth.params.alpha()) / truth.params.alpha();
  m.beta_abs_err = std::abs(fit.params.beta() - truth.params.beta());
  if (fit.epochs && truth.epochs) {
    std::vector<std::size_t> diff;
    std::set_symmetric_difference(fit.epochs->epochs.begin(), fit.epochs->epochs.end(), truth.epochs->epochs.begin(),
                                  truth.epochs->epochs.end(), std::back_inserter(diff));
    m.epoch_set_distance = diff.size();
  }
  return m;
}

}  // namespace valvefit
