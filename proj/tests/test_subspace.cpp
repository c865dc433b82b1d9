#include <gtest/gtest.h>

#include <numeric>

#include "oracles.hpp"
#include "valvefit/random.hpp"
#include "valvefit/subspace.hpp"
#include "valvefit/synthgen.hpp"

using namespace valvefit;
using valvefit::testing::dense_projector_from_modes;

namespace {

const std::vector<double> kOpen5{0.2, 0.4, 0.6, 0.5, 0.3};
const std::vector<std::uint8_t> kModes5{0, 0, 0, 1, 1};

Eigen::Matrix2Xd five_sample_matrix() {
  Eigen::Matrix2Xd z(2, 5);
  for (int i = 0; i < 5; ++i) {
    z(0, i) = kOpen5[static_cast<std::size_t>(i)];
    z(1, i) = forward_flow(ValveParams(1.0, -0.1), z(0, i), static_cast<Stroke>(kModes5[static_cast<std::size_t>(i)]));
  }
  return z;
}

Dataset random_noiseless(Rng& rng, std::size_t n, double noise = 0.0) {
  TrajectoryConfig cfg;
  cfg.n_samples = n;
  cfg.profile = rng.below(2) == 0 ? StrokeProfile::triangular : StrokeProfile::random_walk;
  cfg.n_reversals = 1 + rng.below(6);
  cfg.reversal_probability = rng.uniform(0.02, 0.2);
  double beta = rng.uniform(0.05, 1.0);
  if (rng.below(2) == 0) beta = -beta;
  cfg.params = ValveParams(rng.uniform(0.5, 5.0), beta);
  cfg.noise_std = noise;
  cfg.seed = rng.next_u64();
  return generate(cfg);
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.normal();
  return x;
}

}  // namespace

TEST(ThinSvd2, IdentityMatrix) {
  const Eigen::Matrix2Xd z = Eigen::Matrix2d::Identity();
  const SubspaceBasis b = thin_svd2(z);
  EXPECT_NEAR(b.sigma[0], 1.0, 1e-15);
  EXPECT_NEAR(b.sigma[1], 1.0, 1e-15);
  EXPECT_TRUE((b.v * b.v.transpose()).isApprox(Eigen::Matrix2d::Identity(), 1e-14));
}

TEST(ThinSvd2, FiveSampleExampleMatchesReference) {
  // Reference singular values from an independent LAPACK-backed SVD.
  const Eigen::Matrix2Xd z = five_sample_matrix();
  const SubspaceBasis b = thin_svd2(z);
  EXPECT_NEAR(b.sigma[0], 1.2856836241246894, 1e-13);
  EXPECT_NEAR(b.sigma[1], 0.08377122810132696, 1e-13);
  EXPECT_GT(b.sigma[1], 0.0);
  EXPECT_TRUE((b.v.transpose() * b.v).isApprox(Eigen::Matrix2d::Identity(), 1e-14));
  // Rank-2 reconstruction: Z = (Z V) V^T.
  EXPECT_LE((z - z * b.v * b.v.transpose()).norm(), 1e-10 * z.norm());

  const SubspaceBasis bn = thin_svd2(normalize_rows(z).z);
  EXPECT_NEAR(bn.sigma[0], 1.411199563663369, 1e-13);
  EXPECT_NEAR(bn.sigma[1], 0.09228104635469504, 1e-13);
}

TEST(ThinSvd2, CollinearRowsAreRankOne) {
  Eigen::Matrix2Xd z(2, 6);
  z.row(0) << 0.1, 0.5, 0.3, 0.9, 0.2, 0.7;
  z.row(1) = 3.0 * z.row(0);
  const SubspaceBasis b = thin_svd2(z);
  EXPECT_LE(b.sigma[1], 1e-12 * b.sigma[0]);
}

TEST(ThinSvd2, Errors) {
  Eigen::Matrix2Xd z(2, 3);
  z << 0.1, 0.2, std::numeric_limits<double>::infinity(), 1, 2, 3;
  EXPECT_THROW((void)thin_svd2(z), Error);
  EXPECT_THROW((void)thin_svd2(Eigen::Matrix2Xd(2, 1)), Error);
}

TEST(NormalizeRows, UnitRowsAndScales) {
  const Eigen::Matrix2Xd z = five_sample_matrix();
  const RowScaledMatrix s = normalize_rows(z);
  EXPECT_NEAR(s.z.row(0).norm(), 1.0, 1e-15);
  EXPECT_NEAR(s.z.row(1).norm(), 1.0, 1e-15);
  EXPECT_TRUE((s.z.row(0) * s.scales[0]).isApprox(z.row(0)));
  EXPECT_TRUE((s.z.row(1) * s.scales[1]).isApprox(z.row(1)));
}

TEST(Projector, FixesRangeAndKillsComplement) {
  const Eigen::Matrix2Xd z = five_sample_matrix();
  const SubspaceBasis b = thin_svd2(z);
  const Eigen::VectorXd in_span = 0.7 * z.row(0).transpose() - 1.3 * z.row(1).transpose();
  EXPECT_LE((row_space_projector_apply(b, in_span) - in_span).lpNorm<Eigen::Infinity>(), 1e-10);

  Rng rng(1);
  Eigen::VectorXd x = random_vector(rng, 5);
  const Eigen::VectorXd perp = x - row_space_projector_apply(b, x);
  EXPECT_LE(row_space_projector_apply(b, perp).lpNorm<Eigen::Infinity>(), 1e-10);

  EXPECT_THROW((void)row_space_projector_apply(b, Eigen::VectorXd::Ones(4)), Error);
}

TEST(Projector, FixesModeVectorOnFiveSampleExample) {
  const SubspaceBasis b = thin_svd2(five_sample_matrix());
  const Eigen::VectorXd m = ModeLabels(kModes5).as_vector();
  EXPECT_LE((row_space_projector_apply(b, m) - m).lpNorm<Eigen::Infinity>(), 1e-10);
}

// Independent route: D^T (D D^T)^{-1} D from the true openings and modes
// must coincide with V V^T from the measurement SVD.
TEST(Projector, MatchesDenseProjectorFromModes) {
  Rng rng(2024);
  for (int t = 0; t < 20; ++t) {
    const Dataset ds = random_noiseless(rng, 12 + rng.below(40));
    const Eigen::MatrixXd dense = dense_projector_from_modes(ds.openings(), ds.true_modes()->as_vector());
    const SubspaceBasis b = thin_svd2(normalize_rows(build_data_matrix(ds)).z);
    EXPECT_LE((b.v * b.v.transpose() - dense).lpNorm<Eigen::Infinity>(), 1e-10);
    // The same matrix fixes the mode vector.
    const Eigen::VectorXd m = ds.true_modes()->as_vector();
    EXPECT_LE((dense * m - m).lpNorm<Eigen::Infinity>(), 1e-10);
  }
}

TEST(Projector, IdempotentAndSymmetric) {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const Dataset ds = random_noiseless(rng, 10 + rng.below(200), rng.uniform(0.0, 0.1));
    const SubspaceBasis b = thin_svd2(build_data_matrix(ds));
    const auto n = static_cast<Eigen::Index>(ds.size());
    const Eigen::VectorXd x = random_vector(rng, n), y = random_vector(rng, n);
    const Eigen::VectorXd px = row_space_projector_apply(b, x);
    EXPECT_LE((row_space_projector_apply(b, px) - px).lpNorm<Eigen::Infinity>(), 1e-10);
    EXPECT_NEAR(px.dot(y), x.dot(row_space_projector_apply(b, y)), 1e-10);
  }
}

TEST(Projector, LeftTransformInvariance) {
  Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    const Dataset ds = random_noiseless(rng, 20 + rng.below(100));
    const Eigen::Matrix2Xd z = build_data_matrix(ds);
    Eigen::Matrix2d g;
    do {
      g << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    } while (std::abs(g.determinant()) < 0.1);
    const SubspaceBasis b = thin_svd2(z);
    const SubspaceBasis bg = thin_svd2(g * z);
    const Eigen::VectorXd x = random_vector(rng, z.cols());
    EXPECT_LE((row_space_projector_apply(b, x) - row_space_projector_apply(bg, x)).lpNorm<Eigen::Infinity>(), 1e-9);
  }
}

TEST(InitLabels, FiveSampleExample) {
  const ModeLabels l = init_labels(normalize_rows(five_sample_matrix()).z);
  EXPECT_EQ(l.values(), kModes5);
}

TEST(InitLabels, MinimalFourSampleInstance) {
  // alpha = 1.5, beta = 0.3, two samples per line.
  const double d[] = {0.3, 0.7, 0.6, 0.2};
  const std::vector<std::uint8_t> m{1, 1, 0, 0};
  Eigen::Matrix2Xd z(2, 4);
  for (int i = 0; i < 4; ++i) {
    z(0, i) = d[i];
    z(1, i) = 1.5 * d[i] + 0.3 * m[static_cast<std::size_t>(i)];
  }
  EXPECT_EQ(init_labels(normalize_rows(z).z).values(), m);
}

TEST(InitLabels, CoincidentLinesAreDegenerate) {
  Eigen::Matrix2Xd z(2, 6);
  z.row(0) << 0.1, 0.5, 0.3, 0.9, 0.2, 0.7;
  z.row(1) = 2.0 * z.row(0);
  try {
    (void)init_labels(normalize_rows(z).z);
    FAIL() << "expected DegenerateSpread";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degenerate_spread);
  }
}

TEST(InitLabels, ExactWhenOffsetIsSmallAgainstSpread) {
  Rng rng(404);
  for (int t = 0; t < 40; ++t) {
    TrajectoryConfig cfg;
    cfg.n_samples = 30 + rng.below(300);
    cfg.n_reversals = 1 + rng.below(6);
    const double alpha = rng.uniform(1.0, 5.0);
    cfg.params = ValveParams(alpha, rng.uniform(0.02, 0.2) * alpha * (rng.below(2) ? 1 : -1));
    cfg.seed = rng.next_u64();
    const Dataset ds = generate(cfg);
    EXPECT_EQ(init_labels(normalize_rows(build_data_matrix(ds)).z), *ds.true_modes()) << "trial " << t;
  }
}

TEST(InitLabels, RefinementCompletesNoiselessRecovery) {
  Rng rng(405);
  for (int t = 0; t < 60; ++t) {
    const Dataset ds = random_noiseless(rng, 30 + rng.below(300));
    const Eigen::Matrix2Xd z = normalize_rows(build_data_matrix(ds)).z;
    const IndicatorEstimate est = extract_indicator(thin_svd2(z), init_labels(z));
    EXPECT_EQ(est.labels, *ds.true_modes()) << "trial " << t;
  }
}

TEST(ExtractIndicator, TrueModesAreAFixedPoint) {
  const SubspaceBasis b = thin_svd2(normalize_rows(five_sample_matrix()).z);
  const IndicatorEstimate est = extract_indicator(b, ModeLabels(kModes5));
  EXPECT_TRUE(est.converged);
  EXPECT_EQ(est.iterations, 1u);
  EXPECT_EQ(est.labels.values(), kModes5);
  EXPECT_LE((est.h - ModeLabels(kModes5).as_vector()).lpNorm<Eigen::Infinity>(), 1e-10);
  EXPECT_LE(est.subspace_residual, 1e-10);
}

TEST(ExtractIndicator, RepairsOneFlippedLabel) {
  Rng rng(77);
  std::size_t failures = 0;
  for (int t = 0; t < 40; ++t) {
    TrajectoryConfig cfg;
    cfg.n_samples = 200;
    cfg.n_reversals = 1 + rng.below(5);
    cfg.params = ValveParams(rng.uniform(0.5, 5.0), rng.uniform(0.2, 1.0) * (rng.below(2) ? 1 : -1));
    cfg.seed = rng.next_u64();
    const Dataset ds = generate(cfg);
    auto init = ds.true_modes()->values();
    const auto flip = rng.below(init.size());
    init[flip] = static_cast<std::uint8_t>(1 - init[flip]);
    const SubspaceBasis b = thin_svd2(normalize_rows(build_data_matrix(ds)).z);
    const IndicatorEstimate est = extract_indicator(b, ModeLabels(init));
    if (!(est.converged && est.labels == *ds.true_modes())) ++failures;
  }
  EXPECT_EQ(failures, 0u);
}

TEST(ExtractIndicator, ZeroIsAFixedPoint) {
  const SubspaceBasis b = thin_svd2(five_sample_matrix());
  const IndicatorEstimate est = extract_indicator(b, ModeLabels::constant(5, Stroke::down));
  EXPECT_TRUE(est.converged);
  EXPECT_EQ(est.labels.count_up(), 0u);
}

TEST(ExtractIndicator, DistanceIsMonotone) {
  Rng rng(123);
  for (int t = 0; t < 60; ++t) {
    const Dataset ds = random_noiseless(rng, 20 + rng.below(300), rng.uniform(0.0, 0.3));
    const SubspaceBasis b = thin_svd2(normalize_rows(build_data_matrix(ds)).z);
    std::vector<std::uint8_t> init(ds.size());
    for (auto& v : init) v = static_cast<std::uint8_t>(rng.below(2));
    const IndicatorEstimate est = extract_indicator(b, ModeLabels(init), 1e-10, 200);
    for (std::size_t k = 1; k < est.distance_history.size(); ++k)
      EXPECT_LE(est.distance_history[k], est.distance_history[k - 1] + 1e-12);
    EXPECT_GE(est.subspace_residual, 0.0);
    EXPECT_NEAR(est.subspace_residual * est.subspace_residual, subspace_distance_sq(b, est.labels.as_vector()), 1e-9);
  }
}

TEST(ExtractIndicator, PermutationEquivariance) {
  Rng rng(55);
  const Dataset ds = random_noiseless(rng, 80, 0.05);
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  const Dataset shuffled = ds.permuted(order);

  const SubspaceBasis b = thin_svd2(normalize_rows(build_data_matrix(ds)).z);
  const SubspaceBasis bp = thin_svd2(normalize_rows(build_data_matrix(shuffled)).z);
  const ModeLabels init = init_labels(normalize_rows(build_data_matrix(ds)).z);
  const IndicatorEstimate est = extract_indicator(b, init);
  const IndicatorEstimate estp = extract_indicator(bp, init.permuted(order));
  ASSERT_EQ(estp.labels, est.labels.permuted(order));
  for (std::size_t k = 0; k < order.size(); ++k)
    EXPECT_NEAR(estp.h[static_cast<Eigen::Index>(k)], est.h[static_cast<Eigen::Index>(order[k])], 1e-10);
}

TEST(ExtractIndicator, Errors) {
  const SubspaceBasis b = thin_svd2(five_sample_matrix());
  EXPECT_THROW((void)extract_indicator(b, ModeLabels::constant(4, Stroke::down)), Error);
  EXPECT_THROW((void)extract_indicator(b, ModeLabels(kModes5), 0.0, 10), Error);
  EXPECT_THROW((void)extract_indicator(b, ModeLabels(kModes5), 1e-10, 0), Error);
}
