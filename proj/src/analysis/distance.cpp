#include "isbst/analysis/distance.hpp"

#include <cmath>

#include "isbst/error.hpp"

namespace isbst::analysis {

double euclidean(std::span<const std::int32_t> a, std::span<const std::int32_t> b, const simd::LaneKernels& kernels) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "euclidean: length mismatch");
  return std::sqrt(static_cast<double>(kernels.squared_distance(a.data(), b.data(), a.size())));
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "euclidean: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

}  // namespace isbst::analysis
