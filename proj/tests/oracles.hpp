#pragma once
//
// Test-only reference computations.  These take routes independent of the
// library: dense projectors from the opening/mode matrix, QR least squares
// on the design matrix, and a brute-force grid search.
//

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace valvefit::testing {

// D = [openings; modes] (2 x N).  Returns the dense N x N projector
// D^T (D D^T)^{-1} D with the full Gram matrix (sum of squared openings in
// the (1,1) entry).
inline Eigen::MatrixXd dense_projector_from_modes(const Eigen::VectorXd& openings, const Eigen::VectorXd& modes) {
  Eigen::MatrixXd d(2, openings.size());
  d.row(0) = openings.transpose();
  d.row(1) = modes.transpose();
  const Eigen::Matrix2d gram = d * d.transpose();
  return d.transpose() * gram.inverse() * d;
}

// min || q - alpha mu - beta m ||^2 via column-pivoting Householder QR.
inline std::pair<double, double> qr_least_squares(const Eigen::VectorXd& mu, const Eigen::VectorXd& q,
                                                  const Eigen::VectorXd& m) {
  Eigen::MatrixXd x(mu.size(), 2);
  x.col(0) = mu;
  x.col(1) = m;
  const Eigen::Vector2d sol = x.colPivHouseholderQr().solve(q);
  return {sol[0], sol[1]};
}

inline double ssr(const Eigen::VectorXd& mu, const Eigen::VectorXd& q, const Eigen::VectorXd& m, double alpha,
                  double beta) {
  return (q - alpha * mu - beta * m).squaredNorm();
}

// Zooming grid search over (alpha, beta): evaluate SSR on a (2k+1)^2 grid,
// re-centre on the best node, halve the box, repeat.
inline std::pair<double, double> grid_search_least_squares(const Eigen::VectorXd& mu, const Eigen::VectorXd& q,
                                                           const Eigen::VectorXd& m, double half_width = 16.0,
                                                           int rounds = 90, int k = 20) {
  double ca = 0.0, cb = 0.0, w = half_width;
  for (int r = 0; r < rounds; ++r) {
    double best = std::numeric_limits<double>::infinity();
    double ba = ca, bb = cb;
    for (int i = -k; i <= k; ++i) {
      for (int j = -k; j <= k; ++j) {
        const double a = ca + w * i / k;
        const double b = cb + w * j / k;
        const double s = ssr(mu, q, m, a, b);
        if (s < best) {
          best = s;
          ba = a;
          bb = b;
        }
      }
    }
    ca = ba;
    cb = bb;
    w *= 0.5;
  }
  return {ca, cb};
}

}  // namespace valvefit::testing
