#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "isbst/analysis/mann_whitney.hpp"
#include "isbst/error.hpp"

namespace isbst::analysis {
namespace {

using V = std::vector<double>;

// U of a by pair counting, ties counting one half.
double u_pairs(const V& a, const V& b) {
  double u = 0;
  for (const double x : a) {
    for (const double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  return u;
}

// Two-sided exact p (twice the smaller tail) by enumerating every split of
// the pooled values.
double p_enumerated(const V& a, const V& b) {
  V pool = a;
  pool.insert(pool.end(), b.begin(), b.end());
  const std::size_t n = pool.size(), m = a.size();
  const double obs = u_pairs(a, b);
  std::size_t total = 0, le = 0, ge = 0;
  for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != m) continue;
    V x, y;
    for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1U ? x : y).push_back(pool[i]);
    ++total;
    const double u = u_pairs(x, y);
    le += u <= obs + 1e-9;
    ge += u >= obs - 1e-9;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total));
}

TEST(MannWhitney, SeparatedSamples) {
  const auto r = mann_whitney_u(V{1, 2, 3, 4, 5}, V{101, 102, 103, 104, 105});
  EXPECT_EQ(r.u, 0.0);
  EXPECT_NEAR(r.p, 2.0 / 252.0, 1e-12);
  EXPECT_EQ(r.method, PMethod::Exact);
}

TEST(MannWhitney, NormalApproximationFixtures) {
  // Values from an established statistics package (asymptotic, continuity corrected).
  const auto r = mann_whitney_u(V{1.1, 2.2, 3.3, 4.4, 5.5, 6.6, 7.7, 8.8, 9.9, 10.1},
                                V{5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16});
  EXPECT_EQ(r.method, PMethod::Normal);
  EXPECT_EQ(r.u, 21.0);
  EXPECT_NEAR(r.p, 0.011129227614007952, 1e-9);
  const auto t = mann_whitney_u(V{1, 1, 2, 2, 3, 3, 4, 4, 5, 5}, V{3, 3, 4, 4, 5, 5, 6, 6, 7, 7});
  EXPECT_EQ(t.u, 18.0);
  EXPECT_NEAR(t.p, 0.015856209681046226, 1e-9);
}

TEST(MannWhitney, ExactMatchesEnumerationWithTies) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 150; ++i) {
    V a(3 + rng() % 4), b(3 + rng() % 4);
    const unsigned levels = 2 + rng() % 6;
    for (auto& v : a) v = static_cast<double>(rng() % levels);
    for (auto& v : b) v = static_cast<double>(rng() % levels);
    const auto r = mann_whitney_u(a, b, PMethod::Exact);
    EXPECT_EQ(r.u, u_pairs(a, b));
    EXPECT_NEAR(r.p, p_enumerated(a, b), 1e-9);
  }
}

TEST(MannWhitney, SymmetryAndRange) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < 300; ++i) {
    V a(3 + rng() % 15), b(3 + rng() % 15);
    for (auto& v : a) v = std::round(n(rng) * 3);
    for (auto& v : b) v = std::round(n(rng) * 3 + 1);
    const auto ab = mann_whitney_u(a, b), ba = mann_whitney_u(b, a);
    EXPECT_DOUBLE_EQ(ab.u + ba.u, static_cast<double>(a.size() * b.size()));
    EXPECT_NEAR(ab.p, ba.p, 1e-12);
    EXPECT_GT(ab.p, 0.0);
    EXPECT_LE(ab.p, 1.0);
  }
}

TEST(MannWhitney, IdenticalSamplesAreNotSignificant) {
  const V a{3, 1, 4, 1, 5, 9, 2, 6};
  EXPECT_GE(mann_whitney_u(a, a).p, 0.99);
  const V big{3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8};
  EXPECT_GE(mann_whitney_u(big, big).p, 0.99);
  const auto flat = mann_whitney_u(V{2, 2, 2}, V{2, 2, 2, 2});
  EXPECT_EQ(flat.p, 1.0);
}

TEST(MannWhitney, NormalCloseToExactForSmallSamples) {
  // Continuous draws, so no ties.
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1);
  for (int i = 0; i < 300; ++i) {
    V a(5 + rng() % 4), b(5 + rng() % 4);
    const double shift = 0.25 * static_cast<double>(rng() % 9);
    for (auto& v : a) v = n(rng);
    for (auto& v : b) v = n(rng) + shift;
    EXPECT_NEAR(mann_whitney_u(a, b, PMethod::Normal).p, mann_whitney_u(a, b, PMethod::Exact).p, 0.02);
  }
}

TEST(MannWhitney, RejectsSmallOrNonFiniteSamples) {
  EXPECT_THROW(mann_whitney_u(V{1, 2}, V{1, 2, 3}), Error);
  EXPECT_THROW(mann_whitney_u(V{1, 2, 3}, V{}), Error);
  EXPECT_THROW(mann_whitney_u(V{1, 2, NAN}, V{1, 2, 3}), Error);
}

}  // namespace
}  // namespace isbst::analysis
