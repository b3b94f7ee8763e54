#include "isbst/analysis/mahalanobis.hpp"

#include <algorithm>
#include <cmath>

#include "isbst/error.hpp"

namespace isbst::analysis {

FeatureVector output_features(std::span<const std::int32_t> s) {
  FeatureVector f{};
  if (s.empty()) return f;
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  double sum = 0.0;
  for (const auto v : s) sum += v;
  const double mean = sum / static_cast<double>(s.size());
  double var = 0.0;
  for (const auto v : s) var += (v - mean) * (v - mean);
  std::int64_t inc = 0, dec = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    inc = std::max<std::int64_t>(inc, std::int64_t{s[i]} - s[i - 1]);
    dec = std::max<std::int64_t>(dec, std::int64_t{s[i - 1]} - s[i]);
  }
  f = {static_cast<double>(*lo), static_cast<double>(*hi), mean, std::sqrt(var / static_cast<double>(s.size())),
       static_cast<double>(inc), static_cast<double>(dec)};
  return f;
}

ReferenceModel ReferenceModel::fit(std::span<const FeatureVector> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::kInvalidArgument, "reference model needs at least 2 samples");
  const auto d = static_cast<Eigen::Index>(kFeatureCount);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), d);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) x(static_cast<Eigen::Index>(i), k) = samples[i][static_cast<std::size_t>(k)];
  }
  Eigen::VectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(samples.size() - 1);
  const double eps = std::max(1e-6 * cov.trace() / static_cast<double>(d), 1e-12);
  cov += eps * Eigen::MatrixXd::Identity(d, d);
  return ReferenceModel(std::move(mean), std::move(cov));
}

ReferenceModel::ReferenceModel(Eigen::VectorXd mean, Eigen::MatrixXd covariance)
    : mean_(std::move(mean)), cov_(std::move(covariance)), llt_(cov_) {
  if (cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "covariance shape does not match the mean");
  }
  if (llt_.info() != Eigen::Success) throw Error(ErrorCode::kInvalidArgument, "covariance is not positive definite");
}

double ReferenceModel::distance(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != mean_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "feature vector has the wrong dimension");
  }
  const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(x.data(), mean_.size()) - mean_;
  const Eigen::VectorXd z = llt_.matrixL().solve(diff);
  return std::sqrt(z.squaredNorm());
}

}  // namespace isbst::analysis
