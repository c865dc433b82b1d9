#include "valvefit/commands.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "valvefit/report_io.hpp"

namespace valvefit {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::vector<double> parse_snr_grid(std::string_view text) {
  std::vector<double> grid;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(',', start);
    const std::string item = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (item == "inf" || item == "+inf") {
      grid.push_back(std::numeric_limits<double>::infinity());
    } else {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || !std::isfinite(v))
        throw Error(Errc::invalid_config, "invalid SNR grid entry '" + item + "' in \"" + std::string(text) + "\"");
      grid.push_back(v);
    }
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return grid;
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Dataset ds = generate(opts.trajectory);
    std::ofstream file(opts.out, std::ios::binary);
    if (!file) throw Error(Errc::io_error, "cannot open '" + opts.out + "' for writing");
    write_samples_csv(file, ds);
    file.close();
    if (!file) throw Error(Errc::io_error, "failed writing '" + opts.out + "'");

    try {
      out << "snr_db=" << format_double(measure_snr(clean_flows(ds, opts.trajectory.params), opts.trajectory.noise_std))
          << '\n';
    } catch (const Error& e) {
      if (e.code() != Errc::constant_signal) throw;
      out << "snr_db=nan\n";
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "simulate: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err) {
  std::optional<Dataset> ds;
  try {
    ds = read_samples_csv_file(opts.input, opts.time_ordered);
  } catch (const Error& e) {
    err << "fit: " << e.what() << '\n';
    return kExitUsage;
  }

  const ReportConfigEcho echo{opts.input, opts.time_ordered, opts.fit.tol, opts.fit.max_iter};
  auto write_text = [&](const std::string& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    file << text;
    file.close();
    if (!file) throw Error(Errc::io_error, "cannot write '" + path + "'");
  };

  try {
    std::optional<FitResult> fit;
    int code = kExitOk;
    std::string report_text;
    try {
      fit = fit_pipeline(*ds, opts.fit);
      report_text = serialize_report(make_report(*fit, echo, opts.cv_scale));
    } catch (const EstimationError& e) {
      err << "fit: estimation failed: " << e.what() << '\n';
      report_text = serialize_report(make_error_report(e, echo));
      code = kExitEstimation;
    }
    write_text(opts.report, report_text);
    if (fit && opts.plot_data) {
      std::ofstream file(*opts.plot_data, std::ios::binary);
      write_plot_data(file, *ds, *fit);
      file.close();
      if (!file) throw Error(Errc::io_error, "cannot write '" + *opts.plot_data + "'");
    }
    if (fit) {
      out << "alpha=" << format_double(fit->params.alpha()) << " beta=" << format_double(fit->params.beta())
          << " residual_rms=" << format_double(fit->residual_rms) << '\n';
      for (Warning w : fit->warnings) err << "warning: " << to_string(w) << '\n';
    }
    return code;
  } catch (const Error& e) {
    err << "fit: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_eval(const EvalOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const std::vector<EvalRow> rows = run_eval(opts.eval);
    std::ofstream file(opts.out, std::ios::binary);
    if (!file) throw Error(Errc::io_error, "cannot open '" + opts.out + "' for writing");
    write_eval_csv(file, rows);
    file.close();
    if (!file) throw Error(Errc::io_error, "failed writing '" + opts.out + "'");
    out << "wrote " << rows.size() << " rows to " << opts.out << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "eval: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace valvefit
