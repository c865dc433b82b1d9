#include "valvefit/subspace.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "valvefit/estimator.hpp"
#include "valvefit/kmeans1d.hpp"

namespace valvefit {

RowScaledMatrix normalize_rows(const Eigen::Matrix2Xd& z) {
  RowScaledMatrix out{z, {1.0, 1.0}};
  for (Eigen::Index r = 0; r < 2; ++r) {
    const double norm = z.row(r).norm();
    if (norm > 0.0) {
      out.z.row(r) /= norm;
      out.scales[static_cast<std::size_t>(r)] = norm;
    }
  }
  return out;
}

SubspaceBasis thin_svd2(const Eigen::Matrix2Xd& z) {
  if (z.cols() < 2) throw Error(Errc::too_few_samples, "thin SVD needs at least two columns");
  if (!z.allFinite()) throw Error(Errc::non_finite, "data matrix contains non-finite entries");

  // SVD of the N x 2 transpose gives V as the thin left factor.
  const Eigen::MatrixXd zt = z.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(zt, Eigen::ComputeThinU);
  SubspaceBasis basis;
  basis.v = svd.matrixU();
  basis.sigma = {svd.singularValues()[0], svd.singularValues()[1]};
  return basis;
}

Eigen::VectorXd row_space_projector_apply(const SubspaceBasis& basis, const Eigen::VectorXd& x) {
  if (x.size() != basis.v.rows())
    throw Error(Errc::dimension_mismatch, "vector length " + std::to_string(x.size()) + " does not match basis rows " +
                                              std::to_string(basis.v.rows()));
  const Eigen::Vector2d coeffs = basis.v.transpose() * x;
  return basis.v * coeffs;
}

double subspace_distance_sq(const SubspaceBasis& basis, const Eigen::VectorXd& x) {
  return (x - row_space_projector_apply(basis, x)).squaredNorm();
}

namespace {

Eigen::Matrix2d centred_left_vectors(const Eigen::Matrix2Xd& centered) {
  // Column 0 is the TLS line direction, column 1 its normal.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(centered), Eigen::ComputeThinU);
  return svd.matrixU();
}

}  // namespace

bool on_single_line(const Eigen::Matrix2Xd& z) {
  if (z.cols() < 2) return true;
  const Eigen::Matrix2Xd centered = z.colwise() - z.rowwise().mean();
  const Eigen::VectorXd r = centered.transpose() * centred_left_vectors(centered).col(1);
  return r.maxCoeff() - r.minCoeff() <= kDegenerateSpreadRel * z.cwiseAbs().maxCoeff();
}

ModeLabels init_labels(const Eigen::Matrix2Xd& z) {
  if (z.cols() < 4) throw Error(Errc::too_few_samples, "label initialisation needs at least 4 samples");
  if (!z.allFinite()) throw Error(Errc::non_finite, "data matrix contains non-finite entries");

  const Eigen::Vector2d mean = z.rowwise().mean();
  const Eigen::Matrix2Xd centered = z.colwise() - mean;

  const Eigen::Matrix2d u = centred_left_vectors(centered);
  const double scale = z.cwiseAbs().maxCoeff();
  const Eigen::VectorXd openings = z.row(0).transpose();
  const Eigen::VectorXd flows = z.row(1).transpose();

  // Residuals across the TLS line separate the strokes when the offset is
  // small next to the spread along the lines.  When the offset dominates,
  // the principal axis runs across the gap and the split shows up along
  // column 0 instead.  Both are tried; the better-fitting labelling wins.
  std::optional<ModeLabels> best;
  double best_ssr = std::numeric_limits<double>::infinity();
  std::optional<Error> failure;
  for (Eigen::Index axis : {1, 0}) {
    const Eigen::VectorXd proj = centered.transpose() * u.col(axis);
    const std::vector<double> r(proj.data(), proj.data() + proj.size());
    try {
      // A zero spread across the line means every sample is on it.
      TwoMeans clusters = two_means_1d(r, 100, kDegenerateSpreadRel * scale);
      ModeLabels labels = assign_mode_identity(openings, flows, ModeLabels(std::move(clusters.assignment))).labels;
      const double ssr = ls_fit_labeled(openings, flows, labels).ssr;
      if (ssr < best_ssr) {
        best_ssr = ssr;
        best = std::move(labels);
      }
    } catch (const Error& e) {
      if (axis == 1 && e.code() == Errc::degenerate_spread) throw;
      if (!failure) failure = e;
    }
  }
  if (!best) throw *failure;
  return *best;
}

IndicatorEstimate extract_indicator(const SubspaceBasis& basis, const ModeLabels& init, double tie_tol,
                                    std::size_t max_iter) {
  if (init.size() != static_cast<std::size_t>(basis.v.rows()))
    throw Error(Errc::dimension_mismatch, "initial labels do not match basis size");
  if (!(tie_tol > 0.0) || max_iter < 1) throw Error(Errc::invalid_config, "need tie_tol > 0 and max_iter >= 1");

  IndicatorEstimate est;
  est.labels = init;
  Eigen::VectorXd x = init.as_vector();
  est.h = row_space_projector_apply(basis, x);
  est.distance_history.push_back((x - est.h).squaredNorm());

  while (est.iterations < max_iter) {
    ++est.iterations;
    ModeLabels next = ModeLabels::threshold(est.h, 0.5, tie_tol);
    if (next == est.labels) {
      est.converged = true;
      break;
    }
    est.labels = std::move(next);
    x = est.labels.as_vector();
    est.h = row_space_projector_apply(basis, x);
    est.distance_history.push_back((x - est.h).squaredNorm());
  }
  est.subspace_residual = std::sqrt(est.distance_history.back());
  return est;
}

}  // namespace valvefit
