#include "isbst/analysis/lcs.hpp"

#include <bit>
#include <vector>

namespace isbst::analysis {

std::size_t lcs_length(std::span<const std::int32_t> a, std::span<const std::int32_t> b) {
  if (a.empty() || b.empty()) return 0;
  const std::size_t words = (b.size() + 63) / 64;
  // Match masks of b for the two symbols.
  std::vector<std::uint64_t> match[2] = {std::vector<std::uint64_t>(words, 0), std::vector<std::uint64_t>(words, 0)};
  for (std::size_t i = 0; i < b.size(); ++i) match[b[i] != 0 ? 1 : 0][i / 64] |= std::uint64_t{1} << (i % 64);

  // V holds ones where the DP row did not step; zeros count the LCS.
  std::vector<std::uint64_t> v(words, ~std::uint64_t{0});
  for (const auto x : a) {
    const auto& m = match[x != 0 ? 1 : 0];
    std::uint64_t carry = 0;
    for (std::size_t w = 0; w < words; ++w) {
      const std::uint64_t u = v[w] & m[w];
      const std::uint64_t sum = v[w] + u;
      const std::uint64_t s = sum + carry;
      const std::uint64_t next_carry = (sum < v[w]) | (s < sum);
      v[w] = s | (v[w] - u);
      carry = next_carry;
    }
  }
  std::size_t zeros = 0;
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t bits = ~v[w];
    if (w + 1 == words && b.size() % 64 != 0) bits &= (std::uint64_t{1} << (b.size() % 64)) - 1;
    zeros += static_cast<std::size_t>(std::popcount(bits));
  }
  return zeros;
}

}  // namespace isbst::analysis
