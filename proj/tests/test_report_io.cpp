#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "valvefit/random.hpp"
#include "valvefit/report_io.hpp"
#include "valvefit/synthgen.hpp"

using namespace valvefit;

namespace {

std::string parse_error_message(const std::string& csv) {
  std::istringstream in(csv);
  try {
    (void)read_samples_csv(in, true);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::parse_error);
    return e.what();
  }
  ADD_FAILURE() << "no error";
  return {};
}

}  // namespace

TEST(FormatDouble, RoundTripsBitExactly) {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.below(200)) - 100);
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(SamplesCsv, RoundTrip) {
  TrajectoryConfig cfg;
  cfg.n_samples = 57;
  cfg.params = ValveParams(1.3, -0.2);
  cfg.noise_std = 0.01;
  cfg.seed = 4;
  const Dataset ds = generate(cfg);
  std::stringstream buf;
  write_samples_csv(buf, ds);
  EXPECT_EQ(buf.str().substr(0, kCsvHeader.size()), kCsvHeader);
  const Dataset back = read_samples_csv(buf, true);
  EXPECT_EQ(back, ds);
}

TEST(SamplesCsv, ModesOptional) {
  std::istringstream in("index,opening,flow,mode\n1,0.1,0.2,\n2,0.3,0.4,1\n");
  const Dataset ds = read_samples_csv(in, true);
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_FALSE(ds.true_modes().has_value());
}

TEST(SamplesCsv, Errors) {
  EXPECT_NE(parse_error_message("idx,opening,flow,mode\n1,0.1,0.2,0\n").find("header"), std::string::npos);
  std::string csv{kCsvHeader};
  csv += '\n';
  for (int i = 1; i <= 10; ++i) csv += std::to_string(i) + ",0.5,0.5,0\n";
  csv += "11,abc,0.5,0\n";
  EXPECT_NE(parse_error_message(csv).find("line 12"), std::string::npos);
  EXPECT_NE(parse_error_message("index,opening,flow,mode\n1,0.1,0.2,0\n3,0.1,0.2,0\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(parse_error_message("index,opening,flow,mode\n1,0.1,0.2,2\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error_message("index,opening,flow,mode\n1,0.1,0.2\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error_message("index,opening,flow,mode\n1,nan,0.2,0\n").find("line 2"), std::string::npos);
}

TEST(SamplesCsv, MissingFile) {
  try {
    (void)read_samples_csv_file("/nonexistent/x.csv", true);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io_error);
  }
}

TEST(FitReportJson, RandomRoundTrip) {
  Rng rng(77);
  auto rnd = [&] { return std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.below(60)) - 30); };
  for (int t = 0; t < 200; ++t) {
    FitReport r;
    if (rng.below(4) != 0) {
      r.alpha = rnd();
      r.beta = rnd();
      r.hysteresis_width = rnd();
      r.residual_rms = rnd();
      if (rng.below(2)) r.flow_coefficient = rnd();
    } else {
      r.error = "SingleModeDetected: something";
    }
    const std::size_t n = rng.below(30);
    for (std::size_t i = 0; i < n; ++i) r.labels.push_back(static_cast<int>(rng.below(2)));
    if (rng.below(2)) {
      r.switch_epochs.emplace();
      for (std::size_t i = 0; i < rng.below(5); ++i) r.switch_epochs->push_back(1 + rng.below(1000));
    }
    r.singular_values = {rnd(), rnd()};
    if (rng.below(2)) r.warnings.emplace_back("NoHysteresisDetected");
    r.converged = rng.below(2) == 0;
    r.iterations = rng.below(100);
    r.config.input = "data " + std::to_string(t) + ".csv";
    r.config.time_ordered = rng.below(2) == 0;
    r.config.tol = rnd();
    r.config.max_iter = 1 + rng.below(1000);
    const FitReport back = parse_report(serialize_report(r));
    EXPECT_EQ(back, r) << serialize_report(r);
  }
}

TEST(FitReportJson, NullEpochsAndSchema) {
  FitResult fit;
  fit.params = ValveParams(2.0, -0.1);
  fit.labels = ModeLabels(std::vector<std::uint8_t>{0, 1});
  const FitReport r = make_report(fit, ReportConfigEcho{"in.csv", false, 1e-10, 100});
  const std::string text = serialize_report(r);
  EXPECT_NE(text.find("\"switch_epochs\": null"), std::string::npos) << text;
  EXPECT_NE(text.find("\"schema_version\": \"1\""), std::string::npos) << text;
  EXPECT_EQ(*r.hysteresis_width, 0.05);
  EXPECT_THROW((void)parse_report("{not json"), Error);
}

TEST(EvalCsv, Header) {
  std::ostringstream out;
  write_eval_csv(out, {EvalRow{}});
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), kEvalCsvHeader);
}
