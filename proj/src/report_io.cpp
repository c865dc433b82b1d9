#include "valvefit/report_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace valvefit {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string line_error(std::size_t line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

double parse_real(std::string_view field, std::size_t line, std::string_view column) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (field.empty() || ec != std::errc{} || ptr != last)
    throw Error(Errc::parse_error,
                line_error(line, std::string(column) + " '" + std::string(field) + "' is not a number"));
  if (!std::isfinite(value))
    throw Error(Errc::parse_error, line_error(line, std::string(column) + " must be finite"));
  return value;
}

std::vector<std::string_view> split_commas(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(',', start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

// Minimal JSON emitter over ordered_json: objects one member per line,
// arrays inline, floats with format_double.
void emit(std::ostream& out, const ordered_json& j, int indent) {
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out << ",\n";
        first = false;
        out << std::string(static_cast<std::size_t>(indent + 2), ' ') << ordered_json(key).dump() << ": ";
        emit(out, value, indent + 2);
      }
      out << '\n' << std::string(static_cast<std::size_t>(indent), ' ') << '}';
      return;
    }
    case ordered_json::value_t::array: {
      out << '[';
      bool first = true;
      for (const auto& value : j) {
        if (!first) out << ", ";
        first = false;
        emit(out, value, indent);
      }
      out << ']';
      return;
    }
    case ordered_json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x))
        out << format_double(x);
      else
        out << "null";
      return;
    }
    default:
      out << j.dump();
  }
}

template <class T>
std::optional<T> optional_field(const ordered_json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------

Dataset read_samples_csv(std::istream& in, bool time_ordered) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw Error(Errc::parse_error, "empty input: missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (line != kCsvHeader)
    throw Error(Errc::parse_error,
                line_error(line_no, "header must be exactly '" + std::string(kCsvHeader) + "', got '" + line + "'"));

  std::vector<Measurement> samples;
  std::vector<std::uint8_t> modes;
  bool all_modes = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != 4)
      throw Error(Errc::parse_error, line_error(line_no, "expected 4 columns (index,opening,flow,mode), got " +
                                                             std::to_string(fields.size())));
    long long index = 0;
    const auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), index);
    if (fields[0].empty() || ec != std::errc{} || ptr != fields[0].data() + fields[0].size())
      throw Error(Errc::parse_error, line_error(line_no, "index '" + std::string(fields[0]) + "' is not an integer"));
    if (index != static_cast<long long>(samples.size()) + 1)
      throw Error(Errc::parse_error, line_error(line_no, "index must be " + std::to_string(samples.size() + 1) +
                                                             " (consecutive from 1), got " + std::to_string(index)));
    Measurement m;
    m.index = static_cast<std::size_t>(index);
    m.opening = parse_real(fields[1], line_no, "opening");
    m.flow = parse_real(fields[2], line_no, "flow");
    samples.push_back(m);

    if (fields[3].empty()) {
      all_modes = false;
    } else if (fields[3] == "0" || fields[3] == "1") {
      modes.push_back(fields[3] == "1" ? 1 : 0);
    } else {
      throw Error(Errc::parse_error, line_error(line_no, "mode '" + std::string(fields[3]) + "' must be 0, 1 or empty"));
    }
  }
  if (samples.empty()) throw Error(Errc::parse_error, "no data records after the header");

  std::optional<ModeLabels> true_modes;
  if (all_modes) true_modes = ModeLabels(std::move(modes));
  return Dataset(std::move(samples), time_ordered, std::move(true_modes));
}

Dataset read_samples_csv_file(const std::string& path, bool time_ordered) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open '" + path + "' for reading");
  try {
    return read_samples_csv(in, time_ordered);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void write_samples_csv(std::ostream& out, const Dataset& ds) {
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& s = ds[i];
    out << s.index << ',' << format_double(s.opening) << ',' << format_double(s.flow) << ',';
    if (ds.true_modes()) out << static_cast<int>((*ds.true_modes())[i]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------

FitReport make_report(const FitResult& fit, const ReportConfigEcho& config, std::optional<double> cv_scale) {
  FitReport r;
  r.alpha = fit.params.alpha();
  r.beta = fit.params.beta();
  r.hysteresis_width = fit.params.hysteresis_width();
  if (cv_scale) r.flow_coefficient = fit.params.flow_coefficient(*cv_scale);
  r.labels.assign(fit.labels.values().begin(), fit.labels.values().end());
  if (fit.epochs) r.switch_epochs = std::vector<std::uint64_t>(fit.epochs->epochs.begin(), fit.epochs->epochs.end());
  r.residual_rms = fit.residual_rms;
  r.singular_values = fit.sigma;
  for (Warning w : fit.warnings) r.warnings.emplace_back(to_string(w));
  r.converged = fit.converged;
  r.iterations = fit.iterations;
  r.config = config;
  return r;
}

FitReport make_error_report(const EstimationError& err, const ReportConfigEcho& config) {
  FitReport r;
  r.singular_values = err.sigma();
  for (Warning w : err.warnings()) r.warnings.emplace_back(to_string(w));
  r.config = config;
  r.error = std::string(to_string(err.code())) + ": " + err.what();
  return r;
}

std::string serialize_report(const FitReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); };
  ordered_json j;
  j["schema_version"] = r.schema_version;
  j["alpha"] = opt(r.alpha);
  j["beta"] = opt(r.beta);
  j["hysteresis_width"] = opt(r.hysteresis_width);
  if (r.flow_coefficient) j["flow_coefficient"] = *r.flow_coefficient;
  j["labels"] = r.labels;
  j["switch_epochs"] = r.switch_epochs ? ordered_json(*r.switch_epochs) : ordered_json(nullptr);
  j["residual_rms"] = opt(r.residual_rms);
  j["singular_values"] = r.singular_values;
  j["warnings"] = r.warnings;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["config"] = {{"input", r.config.input},
                 {"time_ordered", r.config.time_ordered},
                 {"tol", r.config.tol},
                 {"max_iter", r.config.max_iter}};
  if (r.error) j["error"] = *r.error;

  std::ostringstream out;
  emit(out, j, 0);
  out << '\n';
  return out.str();
}

FitReport parse_report(std::string_view text) {
  try {
    const ordered_json j = ordered_json::parse(text);
    FitReport r;
    r.schema_version = j.at("schema_version").get<std::string>();
    if (r.schema_version != kReportSchemaVersion)
      throw Error(Errc::parse_error, "unsupported report schema_version '" + r.schema_version + "'");
    r.alpha = optional_field<double>(j, "alpha");
    r.beta = optional_field<double>(j, "beta");
    r.hysteresis_width = optional_field<double>(j, "hysteresis_width");
    r.flow_coefficient = optional_field<double>(j, "flow_coefficient");
    r.labels = j.at("labels").get<std::vector<int>>();
    r.switch_epochs = optional_field<std::vector<std::uint64_t>>(j, "switch_epochs");
    r.residual_rms = optional_field<double>(j, "residual_rms");
    r.singular_values = j.at("singular_values").get<std::array<double, 2>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<std::uint64_t>();
    const auto& c = j.at("config");
    r.config.input = c.at("input").get<std::string>();
    r.config.time_ordered = c.at("time_ordered").get<bool>();
    r.config.tol = c.at("tol").get<double>();
    r.config.max_iter = c.at("max_iter").get<std::uint64_t>();
    r.error = optional_field<std::string>(j, "error");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("malformed report JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

void write_plot_data(std::ostream& out, const Dataset& ds, const FitResult& fit) {
  if (fit.labels.size() != ds.size()) throw Error(Errc::dimension_mismatch, "fit labels do not match dataset");
  out << "index,opening,flow,fitted_flow,label\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& s = ds[i];
    out << s.index << ',' << format_double(s.opening) << ',' << format_double(s.flow) << ','
        << format_double(forward_flow(fit.params, s.opening, fit.labels.stroke(i))) << ','
        << static_cast<int>(fit.labels[i]) << '\n';
  }
}

void write_eval_csv(std::ostream& out, const std::vector<EvalRow>& rows) {
  out << kEvalCsvHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.snr_db) << ',' << to_string(r.method) << ',' << r.trials << ',' << r.n_failures << ','
        << format_double(r.misclassification_mean) << ',' << format_double(r.misclassification_std) << ','
        << format_double(r.alpha_rel_err_mean) << ',' << format_double(r.alpha_rel_err_std) << ','
        << format_double(r.beta_abs_err_mean) << ',' << format_double(r.beta_abs_err_std) << '\n';
  }
}

}  // namespace valvefit
