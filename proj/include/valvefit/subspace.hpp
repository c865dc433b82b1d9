#pragma once
//
// Row-space machinery for the 2 x N data matrix Z = [openings; flows].
//
// For noiseless data Z = A * D * P with D = [openings; modes] (up to the
// unknown column permutation P), so Z and D share a row space and the true
// mode vector m is fixed by the orthogonal projector V V^T built from the
// right singular vectors of Z.  Noisy data are labelled by alternating
// between that 2-D subspace and the binary cube {0,1}^N.
//
// The N x N projector is never formed; it is applied as V (V^T x).
//

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "valvefit/valve_core.hpp"

namespace valvefit {

struct SubspaceBasis {
  Eigen::MatrixX2d v;                    // N x 2, orthonormal columns
  std::array<double, 2> sigma{0.0, 0.0};  // descending
};

struct IndicatorEstimate {
  Eigen::VectorXd h;  // projected indicator V V^T labels, from the last iteration
  ModeLabels labels;
  double subspace_residual = 0.0;  // || labels - V V^T labels ||_2 at exit
  std::size_t iterations = 0;
  bool converged = false;
  // || labels_k - V V^T labels_k ||^2 for the initial labels and after each update.
  std::vector<double> distance_history;
};

struct RowScaledMatrix {
  Eigen::Matrix2Xd z;
  std::array<double, 2> scales{1.0, 1.0};  // original row norms; z.row(i) * scales[i] restores the input
};

// Scales each row to unit Euclidean norm.  A zero row is left untouched
// with scale 1.
[[nodiscard]] RowScaledMatrix normalize_rows(const Eigen::Matrix2Xd& z);

// Economy SVD of a 2 x N matrix, N >= 2.  Throws Errc::non_finite or
// Errc::too_few_samples.
[[nodiscard]] SubspaceBasis thin_svd2(const Eigen::Matrix2Xd& z);

// V (V^T x).  Throws Errc::dimension_mismatch.
[[nodiscard]] Eigen::VectorXd row_space_projector_apply(const SubspaceBasis& basis, const Eigen::VectorXd& x);

// Squared distance || x - V V^T x ||^2.
[[nodiscard]] double subspace_distance_sq(const SubspaceBasis& basis, const Eigen::VectorXd& x);

// Initial labelling from the global total-least-squares line:
// center the columns of z and take both principal directions from an SVD of
// the centred matrix.  The projections onto each direction are clustered
// with 1-D two-means, label 1 goes to the cluster that fits the
// origin-anchored two-line model better, and the labelling with the smaller
// SSR is returned.  N >= 4.  Throws Errc::degenerate_spread when the
// residuals across the line coincide (one line only).
[[nodiscard]] ModeLabels init_labels(const Eigen::Matrix2Xd& z);

// Relative spread below which residuals count as identical.
inline constexpr double kDegenerateSpreadRel = 1e-12;

// True when every column of z lies on one straight line (not necessarily
// through the origin): the residuals across the total-least-squares line
// span no more than kDegenerateSpreadRel * max|z|.
[[nodiscard]] bool on_single_line(const Eigen::Matrix2Xd& z);

// Alternating projection: h <- V V^T labels, labels <- [h >= 0.5] with ties
// (within tie_tol) going to the up-stroke, until the labels repeat or
// max_iter updates have been made.
[[nodiscard]] IndicatorEstimate extract_indicator(const SubspaceBasis& basis, const ModeLabels& init,
                                                  double tie_tol = 1e-10, std::size_t max_iter = 100);

}  // namespace valvefit
