#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace isbst::analysis {

// Longest common subsequence of two BOOL sequences (nonzero = true).
// Bit-parallel over 64-bit words, O(|a| * ceil(|b| / 64)).
std::size_t lcs_length(std::span<const std::int32_t> a, std::span<const std::int32_t> b);

}  // namespace isbst::analysis
