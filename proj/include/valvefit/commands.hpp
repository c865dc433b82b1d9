#pragma once
//
// Command implementations behind the `valvefit` executable.  Each returns
// the process exit code: 0 success, 1 usage or I/O error, 2 estimation
// failure.  Diagnostics go to `err`.
//

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "valvefit/estimator.hpp"
#include "valvefit/harness.hpp"
#include "valvefit/synthgen.hpp"

namespace valvefit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitEstimation = 2;

struct SimulateOptions {
  TrajectoryConfig trajectory;
  std::string out;
};

// Writes the sample CSV (ground-truth modes filled in) and prints the
// achieved flow SNR as `snr_db=<value>` on `out`.
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);

struct FitOptions {
  std::string input;
  std::string report;
  std::optional<std::string> plot_data;
  bool time_ordered = true;
  FitConfig fit;
  std::optional<double> cv_scale;
};

// Runs fit_pipeline on a sample CSV.  On estimation failure the report is
// still written, with an "error" member, and 2 is returned.
int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err);

struct EvalOptions {
  EvalConfig eval;
  std::string out;
};

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err);

// "40,30,20,10"; "inf" for noiseless.  Throws Errc::invalid_config.
[[nodiscard]] std::vector<double> parse_snr_grid(std::string_view text);

}  // namespace valvefit
