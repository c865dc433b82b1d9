#pragma once
//
// Interchange formats.
//
// Sample CSV: header exactly `index,opening,flow,mode`, '.' decimal
// separator, one record per line, mode empty when unknown.
//
// Fit report: JSON object, schema_version "1".  Numbers are written with
// 17 significant digits so doubles survive a round trip bit-exactly.
//

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "valvefit/estimator.hpp"
#include "valvefit/harness.hpp"
#include "valvefit/valve_core.hpp"

namespace valvefit {

inline constexpr std::string_view kCsvHeader = "index,opening,flow,mode";
inline constexpr std::string_view kReportSchemaVersion = "1";

// Shortest-safe formatting: 17 significant digits, "inf"/"-inf"/"nan" for
// non-finite values.
[[nodiscard]] std::string format_double(double x);

// Throws Errc::parse_error naming the offending line.  Openings outside
// [0,1] are accepted (fit_pipeline flags them).  true_modes is set only
// when every record carries a mode.
[[nodiscard]] Dataset read_samples_csv(std::istream& in, bool time_ordered);
[[nodiscard]] Dataset read_samples_csv_file(const std::string& path, bool time_ordered);
void write_samples_csv(std::ostream& out, const Dataset& ds);

struct ReportConfigEcho {
  std::string input;
  bool time_ordered = true;
  double tol = 1e-10;
  std::uint64_t max_iter = 100;

  friend bool operator==(const ReportConfigEcho&, const ReportConfigEcho&) = default;
};

struct FitReport {
  std::string schema_version{kReportSchemaVersion};
  // Estimates; absent when the fit failed.
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> hysteresis_width;
  std::optional<double> flow_coefficient;  // only with a user-supplied C_v scale
  std::vector<int> labels;
  std::optional<std::vector<std::uint64_t>> switch_epochs;
  std::optional<double> residual_rms;
  std::array<double, 2> singular_values{0.0, 0.0};
  std::vector<std::string> warnings;
  bool converged = false;
  std::uint64_t iterations = 0;
  ReportConfigEcho config;
  std::optional<std::string> error;

  friend bool operator==(const FitReport&, const FitReport&) = default;
};

[[nodiscard]] FitReport make_report(const FitResult& fit, const ReportConfigEcho& config,
                                    std::optional<double> cv_scale = std::nullopt);
[[nodiscard]] FitReport make_error_report(const EstimationError& err, const ReportConfigEcho& config);

[[nodiscard]] std::string serialize_report(const FitReport& report);
// Throws Errc::parse_error.
[[nodiscard]] FitReport parse_report(std::string_view json_text);

// Per-sample plot data: index,opening,flow,fitted_flow,label.
void write_plot_data(std::ostream& out, const Dataset& ds, const FitResult& fit);

inline constexpr std::string_view kEvalCsvHeader =
    "snr_db,method,trials,n_failures,misclassification_mean,misclassification_std,"
    "alpha_rel_err_mean,alpha_rel_err_std,beta_abs_err_mean,beta_abs_err_std";
void write_eval_csv(std::ostream& out, const std::vector<EvalRow>& rows);

}  // namespace valvefit
