#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace isbst::analysis {

inline constexpr std::size_t kFeatureCount = 6;
using FeatureVector = std::array<double, kFeatureCount>;

// (min, max, mean, population stddev, max.increase, max.decrease) of Output_9.
FeatureVector output_features(std::span<const std::int32_t> output9);

class ReferenceModel {
 public:
  // Sample mean and covariance of `samples` (at least 2), regularized by
  // eps*I with eps = 1e-6 * trace / d.
  static ReferenceModel fit(std::span<const FeatureVector> samples);
  // Explicit model; covariance must be symmetric positive definite.
  ReferenceModel(Eigen::VectorXd mean, Eigen::MatrixXd covariance);

  const Eigen::VectorXd& mean() const noexcept { return mean_; }
  const Eigen::MatrixXd& covariance() const noexcept { return cov_; }

  double distance(std::span<const double> x) const;  // throws on dimension mismatch

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace isbst::analysis
