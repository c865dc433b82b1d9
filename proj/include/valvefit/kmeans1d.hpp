#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace valvefit {

struct TwoMeans {
  std::vector<std::uint8_t> assignment;  // 0 = low cluster, 1 = high cluster
  double low_center = 0.0;
  double high_center = 0.0;
  std::size_t iterations = 0;
};

// Lloyd's algorithm on scalars with k = 2, centers seeded at min and max.
// A point equidistant from both centers goes to the low cluster.
// Throws Errc::degenerate_spread when max - min <= spread_tol.
[[nodiscard]] TwoMeans two_means_1d(std::span<const double> x, std::size_t max_iter = 100, double spread_tol = 0.0);

}  // namespace valvefit
