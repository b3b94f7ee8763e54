#include "isbst/analysis/sax.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "isbst/error.hpp"

namespace isbst::analysis {
namespace {

constexpr std::array<double, 45> kCuts{
    // a = 2
    0.0,
    // a = 3
    -0.43072729929545756, 0.43072729929545756,
    // a = 4
    -0.67448975019608171, 0.0, 0.67448975019608171,
    // a = 5
    -0.84162123357291418, -0.25334710313579972, 0.25334710313579972, 0.84162123357291418,
    // a = 6
    -0.96742156610170105, -0.43072729929545756, 0.0, 0.43072729929545756, 0.96742156610170105,
    // a = 7
    -1.0675705238781414, -0.56594882193286311, -0.1800123697927051, 0.1800123697927051, 0.56594882193286311,
    1.0675705238781414,
    // a = 8
    -1.1503493803760079, -0.67448975019608171, -0.31863936396437514, 0.0, 0.31863936396437514,
    0.67448975019608171, 1.1503493803760079,
    // a = 9
    -1.2206403488473501, -0.7647096737863871, -0.43072729929545756, -0.13971029888186212, 0.13971029888186212,
    0.43072729929545756, 0.7647096737863871, 1.2206403488473501,
    // a = 10
    -1.2815515655446004, -0.84162123357291418, -0.52440051270804089, -0.25334710313579972, 0.0,
    0.25334710313579972, 0.52440051270804089, 0.84162123357291418, 1.2815515655446004,
};

}  // namespace

void SaxParams::validate(std::size_t series_length) const {
  if (alphabet < 2 || alphabet > 10) throw Error(ErrorCode::kInvalidArgument, "SAX alphabet must be in [2, 10]");
  if (word_length < 1) throw Error(ErrorCode::kInvalidArgument, "SAX word length must be positive");
  if (series_length < word_length) {
    throw Error(ErrorCode::kInvalidArgument, "series of length " + std::to_string(series_length) +
                                                 " is shorter than the SAX word (" + std::to_string(word_length) + ")");
  }
}

std::span<const double> sax_breakpoints(std::size_t alphabet) {
  if (alphabet < 2 || alphabet > 10) throw Error(ErrorCode::kInvalidArgument, "SAX alphabet must be in [2, 10]");
  // Offset of alphabet a is sum_{k=2}^{a-1} (k-1).
  const std::size_t offset = (alphabet - 2) * (alphabet - 1) / 2;
  return std::span<const double>(kCuts).subspan(offset, alphabet - 1);
}

std::vector<double> z_normalize(std::span<const double> x) {
  std::vector<double> out(x.size(), 0.0);
  if (x.empty()) return out;
  double mean = 0.0;
  for (const double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (const double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(x.size()));
  if (sd <= 1e-12) return out;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean) / sd;
  return out;
}

std::vector<double> z_normalize(std::span<const std::int32_t> x) {
  std::vector<double> d(x.begin(), x.end());
  return z_normalize(d);
}

std::vector<double> paa(std::span<const double> x, std::size_t w) {
  const std::size_t n = x.size();
  if (w == 0 || w > n) throw Error(ErrorCode::kInvalidArgument, "PAA needs 1 <= w <= n");
  std::vector<double> out(w, 0.0);
  // Point i covers [i*w, (i+1)*w) and segment s covers [s*n, (s+1)*n) on a
  // common grid of n*w units.
  for (std::size_t s = 0; s < w; ++s) {
    const std::size_t lo = s * n, hi = (s + 1) * n;
    double acc = 0.0;
    for (std::size_t i = lo / w; i < n && i * w < hi; ++i) {
      const std::size_t a = std::max(lo, i * w), b = std::min(hi, (i + 1) * w);
      if (b > a) acc += x[i] * static_cast<double>(b - a);
    }
    out[s] = acc / static_cast<double>(n);
  }
  return out;
}

std::vector<std::uint8_t> symbolize(std::span<const double> values, std::size_t alphabet) {
  const auto cuts = sax_breakpoints(alphabet);
  std::vector<std::uint8_t> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(std::upper_bound(cuts.begin(), cuts.end(), values[i]) - cuts.begin());
  }
  return out;
}

std::vector<std::uint8_t> sax_word(std::span<const std::int32_t> x, const SaxParams& params) {
  params.validate(x.size());
  return symbolize(paa(z_normalize(x), params.word_length), params.alphabet);
}

double symbol_distance(std::uint8_t r, std::uint8_t c, std::size_t alphabet) {
  if (r > c) std::swap(r, c);
  if (c - r <= 1) return 0.0;
  const auto cuts = sax_breakpoints(alphabet);
  return cuts[c - 1] - cuts[r];
}

double sax_mindist(std::span<const std::int32_t> a, std::span<const std::int32_t> b, const SaxParams& params) {
  if (a.size() != b.size()) throw Error(ErrorCode::kInvalidArgument, "sax_mindist: length mismatch");
  const auto wa = sax_word(a, params);
  const auto wb = sax_word(b, params);
  double sum = 0.0;
  for (std::size_t i = 0; i < wa.size(); ++i) {
    const double d = symbol_distance(wa[i], wb[i], params.alphabet);
    sum += d * d;
  }
  return std::sqrt(static_cast<double>(a.size()) / static_cast<double>(params.word_length)) * std::sqrt(sum);
}

}  // namespace isbst::analysis
