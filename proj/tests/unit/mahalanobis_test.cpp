#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "isbst/analysis/mahalanobis.hpp"
#include "isbst/error.hpp"

namespace isbst::analysis {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST(Mahalanobis, IdentityIsEuclidean) {
  const ReferenceModel m(VectorXd::Zero(6), MatrixXd::Identity(6, 6));
  const std::vector<double> x{1, 2, 2, 0, 0, 4};
  EXPECT_DOUBLE_EQ(m.distance(x), 5.0);
}

TEST(Mahalanobis, DiagonalExample) {
  MatrixXd cov = MatrixXd::Identity(6, 6);
  cov(0, 0) = 4;
  const ReferenceModel m(VectorXd::Zero(6), cov);
  EXPECT_DOUBLE_EQ(m.distance(std::vector<double>{2, 0, 0, 0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(m.distance(std::vector<double>{0, 2, 0, 0, 0, 0}), 2.0);
}

TEST(Mahalanobis, MeanIsZeroAndErrors) {
  VectorXd mu(6);
  mu << 1, 2, 3, 4, 5, 6;
  const ReferenceModel m(mu, MatrixXd::Identity(6, 6));
  EXPECT_EQ(m.distance(std::vector<double>{1, 2, 3, 4, 5, 6}), 0.0);
  EXPECT_THROW(m.distance(std::vector<double>{1, 2}), Error);
  MatrixXd bad = MatrixXd::Identity(6, 6);
  bad(2, 2) = -1;
  EXPECT_THROW(ReferenceModel(mu, bad), Error);
  EXPECT_THROW(ReferenceModel(mu, MatrixXd::Identity(5, 5)), Error);
}

TEST(Mahalanobis, MatchesExplicitInverse) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0, 1);
  for (int k = 0; k < 100; ++k) {
    MatrixXd a(6, 6);
    for (int i = 0; i < 36; ++i) a.data()[i] = n(rng);
    const MatrixXd cov = a * a.transpose() + 0.5 * MatrixXd::Identity(6, 6);
    VectorXd mu(6), x(6);
    for (int i = 0; i < 6; ++i) {
      mu(i) = n(rng);
      x(i) = n(rng);
    }
    const ReferenceModel m(mu, cov);
    const VectorXd d = x - mu;
    const double want = std::sqrt(d.dot(cov.inverse() * d));
    EXPECT_NEAR(m.distance(std::vector<double>(x.data(), x.data() + 6)), want, 1e-9 * (1 + want));
  }
}

TEST(Mahalanobis, FitEstimatesMomentsAndToleratesConstants) {
  std::vector<FeatureVector> s{{1, 0, 5, 5, 5, 5}, {3, 2, 5, 5, 5, 5}, {5, 4, 5, 5, 5, 5}};
  const auto m = ReferenceModel::fit(s);
  EXPECT_DOUBLE_EQ(m.mean()(0), 3.0);
  EXPECT_DOUBLE_EQ(m.mean()(2), 5.0);
  EXPECT_NEAR(m.covariance()(0, 1), 4.0, 1e-12);  // unbiased
  EXPECT_TRUE(std::isfinite(m.distance(std::vector<double>{3, 2, 6, 5, 5, 5})));
  const std::vector<FeatureVector> same(4, FeatureVector{1, 1, 1, 1, 1, 1});
  EXPECT_EQ(ReferenceModel::fit(same).distance(std::vector<double>{1, 1, 1, 1, 1, 1}), 0.0);
  EXPECT_THROW(ReferenceModel::fit(std::vector<FeatureVector>(1)), Error);
}

TEST(Mahalanobis, OutputFeatures) {
  const std::vector<std::int32_t> y{0, 4, 2, 2};
  const auto f = output_features(y);
  EXPECT_EQ(f[0], 0);
  EXPECT_EQ(f[1], 4);
  EXPECT_EQ(f[2], 2);
  EXPECT_DOUBLE_EQ(f[3], std::sqrt(2.0));
  EXPECT_EQ(f[4], 4);
  EXPECT_EQ(f[5], 2);
}

}  // namespace
}  // namespace isbst::analysis
