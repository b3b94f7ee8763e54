#pragma once
// Two-sided Mann-Whitney U (Wilcoxon rank-sum) with midranks for ties.

#include <span>

namespace isbst::analysis {

enum class PMethod { Auto, Exact, Normal };

struct MannWhitneyResult {
  double u = 0.0;  // U of sample_a
  double p = 1.0;
  PMethod method = PMethod::Auto;  // the branch actually used
};

// Auto: exact permutation distribution of the midrank sum when both samples
// have at most 8 values, otherwise the normal approximation with continuity
// correction and tie-corrected variance. All values equal gives p = 1.
// Throws kInvalidArgument when either sample has fewer than 3 values or a
// non-finite value.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                                 PMethod method = PMethod::Auto);

inline constexpr std::size_t kExactLimit = 8;

}  // namespace isbst::analysis
