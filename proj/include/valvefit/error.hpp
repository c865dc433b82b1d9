#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace valvefit {

enum class Errc {
  empty_dataset,
  too_few_samples,
  invalid_dataset,
  not_time_ordered,
  non_finite,
  dimension_mismatch,
  degenerate_spread,
  single_mode_detected,
  ill_conditioned,
  non_positive_gain,
  all_openings_zero,
  constant_signal,
  invalid_config,
  parse_error,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace valvefit
