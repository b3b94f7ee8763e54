#pragma once
// Symbolic aggregate approximation and its lower-bounding distance.

#include <cstdint>
#include <span>
#include <vector>

namespace isbst::analysis {

struct SaxParams {
  std::size_t word_length = 8;
  std::size_t alphabet = 4;

  void validate(std::size_t series_length) const;  // throws kInvalidArgument
};

// Equiprobable N(0,1) cut points, ascending; alphabet - 1 of them, 2 <= a <= 10.
std::span<const double> sax_breakpoints(std::size_t alphabet);

// Population std; series with std <= 1e-12 map to all zeros.
std::vector<double> z_normalize(std::span<const double> x);
std::vector<double> z_normalize(std::span<const std::int32_t> x);

// Segment means with fractional boundary weights when w does not divide n.
std::vector<double> paa(std::span<const double> x, std::size_t w);

// Symbol = number of breakpoints <= value.
std::vector<std::uint8_t> symbolize(std::span<const double> paa_values, std::size_t alphabet);
std::vector<std::uint8_t> sax_word(std::span<const std::int32_t> x, const SaxParams& params);

double symbol_distance(std::uint8_t r, std::uint8_t c, std::size_t alphabet);

double sax_mindist(std::span<const std::int32_t> a, std::span<const std::int32_t> b,
                   const SaxParams& params = {});

}  // namespace isbst::analysis
