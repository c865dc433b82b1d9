// valvefit: identify gain, hysteresis offset and stroke switching of a
// linear control valve from (opening, flow) samples.
//
//   valvefit simulate --n 200 --alpha 2 --beta -0.1 --noise-std 0.01 --out d.csv
//   valvefit fit d.csv --report r.json [--plot-data p.csv] [--time-ordered false]
//   valvefit eval --snr-grid 40,30,20,10 --trials 200 --seed 1 --out eval.csv

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "valvefit/commands.hpp"

namespace {

struct TrajectoryFlags {
  std::size_t n = 200;
  double alpha = 1.0;
  double beta = 0.0;
  std::string profile = "triangular";
  std::size_t reversals = 1;
  double reversal_prob = 0.05;
  double open_lo = 0.0;
  double open_hi = 1.0;
  bool shuffle = false;
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--n", n, "Number of samples")->capture_default_str();
    cmd->add_option("--alpha", alpha, "Flow gain per unit opening")->capture_default_str();
    cmd->add_option("--beta", beta, "Up-stroke flow offset")->capture_default_str();
    cmd->add_option("--profile", profile, "Stroke profile")
        ->check(CLI::IsMember({"triangular", "random"}))
        ->capture_default_str();
    cmd->add_option("--reversals", reversals, "Stroke reversals (triangular)")->capture_default_str();
    cmd->add_option("--reversal-prob", reversal_prob, "Per-step reversal probability (random)")
        ->capture_default_str();
    cmd->add_option("--open-lo", open_lo, "Lowest opening")->capture_default_str();
    cmd->add_option("--open-hi", open_hi, "Highest opening")->capture_default_str();
    cmd->add_flag("--shuffle", shuffle, "Permute samples (unknown time order)");
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
  }

  valvefit::TrajectoryConfig config() const {
    valvefit::TrajectoryConfig cfg;
    cfg.n_samples = n;
    cfg.params = valvefit::ValveParams(alpha, beta);
    cfg.profile = valvefit::parse_stroke_profile(profile);
    cfg.n_reversals = reversals;
    cfg.reversal_probability = reversal_prob;
    cfg.opening_lo = open_lo;
    cfg.opening_hi = open_hi;
    cfg.shuffle = shuffle;
    cfg.seed = seed;
    return cfg;
  }
};

std::size_t threads_from_env() {
  const char* v = std::getenv("VALVEFIT_THREADS");
  if (v == nullptr || *v == '\0') return 0;
  try {
    return static_cast<std::size_t>(std::stoul(v));
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Control valve hysteresis identification"};
  app.require_subcommand(1);

  TrajectoryFlags sim_flags;
  double noise_std = 0.0;
  std::string sim_out;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic valve trajectory CSV");
  sim_flags.attach(simulate);
  simulate->add_option("--noise-std", noise_std, "Flow noise standard deviation")->capture_default_str();
  simulate->add_option("--out", sim_out, "Output CSV path")->required();

  valvefit::FitOptions fit_opts;
  std::string plot_data;
  double cv_scale = 0.0;
  auto* fit = app.add_subcommand("fit", "Estimate valve parameters from a sample CSV");
  fit->add_option("input", fit_opts.input, "Sample CSV (index,opening,flow,mode)")->required();
  fit->add_option("--report", fit_opts.report, "Report JSON path")->required();
  auto* plot_opt = fit->add_option("--plot-data", plot_data, "Per-sample fitted-flow CSV path");
  fit->add_option("--time-ordered", fit_opts.time_ordered, "Samples are in time order (true|false)")
      ->capture_default_str();
  fit->add_option("--tol", fit_opts.fit.tol, "Threshold tie tolerance")->capture_default_str();
  fit->add_option("--max-iter", fit_opts.fit.max_iter, "Refinement iteration cap")->capture_default_str();
  auto* cv_opt = fit->add_option("--cv-scale", cv_scale, "Slope-to-Cv factor for a flow coefficient readout");

  TrajectoryFlags eval_flags;
  valvefit::EvalOptions eval_opts;
  std::string grid = "40,30,20,10";
  auto* eval = app.add_subcommand("eval", "Monte-Carlo comparison across SNR levels");
  eval_flags.attach(eval);
  eval->add_option("--snr-grid", grid, "Comma-separated SNR values in dB ('inf' = noiseless)")->capture_default_str();
  eval->add_option("--trials", eval_opts.eval.trials_per_point, "Trials per SNR point")->capture_default_str();
  eval->add_option("--out", eval_opts.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? valvefit::kExitOk : valvefit::kExitUsage;
  }

  try {
    if (*simulate) {
      valvefit::SimulateOptions opts;
      opts.trajectory = sim_flags.config();
      opts.trajectory.noise_std = noise_std;
      opts.out = sim_out;
      return valvefit::cmd_simulate(opts, std::cout, std::cerr);
    }
    if (*fit) {
      if (*plot_opt) fit_opts.plot_data = plot_data;
      if (*cv_opt) fit_opts.cv_scale = cv_scale;
      return valvefit::cmd_fit(fit_opts, std::cout, std::cerr);
    }
    eval_opts.eval.trajectory = eval_flags.config();
    eval_opts.eval.seed = eval_flags.seed;
    eval_opts.eval.snr_grid_db = valvefit::parse_snr_grid(grid);
    eval_opts.eval.threads = threads_from_env();
    return valvefit::cmd_eval(eval_opts, std::cout, std::cerr);
  } catch (const valvefit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return valvefit::kExitUsage;
  }
}
