#include "valvefit/kmeans1d.hpp"

#include <algorithm>
#include <cmath>

#include "valvefit/error.hpp"

namespace valvefit {

TwoMeans two_means_1d(std::span<const double> x, std::size_t max_iter, double spread_tol) {
  if (x.size() < 2) throw Error(Errc::too_few_samples, "two-means needs at least two points");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (!(*hi - *lo > spread_tol)) throw Error(Errc::degenerate_spread, "scalar spread is zero; only one cluster present");

  TwoMeans out;
  out.low_center = *lo;
  out.high_center = *hi;
  out.assignment.assign(x.size(), 0);

  for (std::size_t it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    double sum[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto c = static_cast<std::uint8_t>(std::abs(x[i] - out.high_center) < std::abs(x[i] - out.low_center));
      out.assignment[i] = c;
      sum[c] += x[i];
      ++count[c];
    }
    // Seeds at the extremes keep both clusters non-empty.
    const double low = sum[0] / static_cast<double>(count[0]);
    const double high = sum[1] / static_cast<double>(count[1]);
    if (low == out.low_center && high == out.high_center) break;
    out.low_center = low;
    out.high_center = high;
  }
  return out;
}

}  // namespace valvefit
