#pragma once

#include <cstdint>
#include <span>

#include "isbst/simd/kernels.hpp"

namespace isbst::analysis {

// sqrt(sum (a_i - b_i)^2); throws kInvalidArgument on unequal lengths.
double euclidean(std::span<const std::int32_t> a, std::span<const std::int32_t> b,
                 const simd::LaneKernels& kernels = simd::active_kernels());
double euclidean(std::span<const double> a, std::span<const double> b);

}  // namespace isbst::analysis
