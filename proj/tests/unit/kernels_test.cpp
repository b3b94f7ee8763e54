#include "isbst/simd/kernels.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <random>
#include <vector>

namespace isbst::simd {
namespace {

std::vector<std::int16_t> random_words(std::mt19937_64& rng, std::size_t n) {
  static constexpr std::int16_t kEdges[] = {0, 1, -1, 2, -2, 32767, -32768, 32766, -32767, 255, 256, 181, -181};
  std::vector<std::int16_t> v(n);
  for (auto& w : v) {
    w = rng() % 3 == 0 ? kEdges[rng() % std::size(kEdges)] : static_cast<std::int16_t>(rng());
  }
  return v;
}

std::vector<std::int32_t> random_samples(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::int32_t> v(n);
  for (auto& s : v) s = static_cast<std::int32_t>(rng() % 65536) - 32768;
  return v;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = avx2_kernels();
    if (simd_ == nullptr) GTEST_SKIP() << "no AVX2 on this machine";
  }
  const LaneKernels& ref_ = scalar_kernels();
  const LaneKernels* simd_ = nullptr;
  std::mt19937_64 rng_{7};
};

TEST_F(KernelEquivalence, ArithMatchesScalar) {
  for (auto op : {ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div, ArithOp::Min, ArithOp::Max}) {
    for (auto sign : {Signedness::Signed, Signedness::Unsigned}) {
      for (std::size_t n : {0, 1, 15, 16, 17, 64, 101}) {
        for (int rep = 0; rep < 20; ++rep) {
          const auto a = random_words(rng_, n);
          const auto b = random_words(rng_, n);
          std::vector<std::int16_t> x(n), y(n);
          ref_.arith(op, sign, a.data(), b.data(), x.data(), n);
          simd_->arith(op, sign, a.data(), b.data(), y.data(), n);
          ASSERT_EQ(x, y) << "op " << int(op) << " sign " << int(sign) << " n " << n;
        }
      }
    }
  }
}

TEST_F(KernelEquivalence, UnaryCompareLogicMatchScalar) {
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = rng_() % 80;
    const auto a = random_words(rng_, n);
    const auto b = random_words(rng_, n);
    auto c = random_words(rng_, n);
    std::vector<std::int16_t> x(n), y(n);
    for (auto sign : {Signedness::Signed, Signedness::Unsigned}) {
      for (auto op : {UnaryOp::Abs, UnaryOp::Neg}) {
        ref_.unary(op, sign, a.data(), x.data(), n);
        simd_->unary(op, sign, a.data(), y.data(), n);
        ASSERT_EQ(x, y);
      }
      for (auto op : {CompareOp::Lt, CompareOp::Le, CompareOp::Gt, CompareOp::Ge, CompareOp::Eq, CompareOp::Ne}) {
        ref_.compare(op, sign, a.data(), b.data(), x.data(), n);
        simd_->compare(op, sign, a.data(), b.data(), y.data(), n);
        ASSERT_EQ(x, y);
      }
      for (auto to : {Signedness::Signed, Signedness::Unsigned}) {
        ref_.convert(sign, to, -1000, 40000, a.data(), x.data(), n);
        simd_->convert(sign, to, -1000, 40000, a.data(), y.data(), n);
        ASSERT_EQ(x, y);
      }
    }
    for (auto op : {LogicOp::And, LogicOp::Or, LogicOp::Xor}) {
      ref_.logic(op, a.data(), b.data(), x.data(), n);
      simd_->logic(op, a.data(), b.data(), y.data(), n);
      ASSERT_EQ(x, y);
    }
    ref_.logic_not(a.data(), x.data(), n);
    simd_->logic_not(a.data(), y.data(), n);
    ASSERT_EQ(x, y);
    for (auto& w : c) w = static_cast<std::int16_t>(w & 1);
    ref_.mux(c.data(), a.data(), b.data(), x.data(), n);
    simd_->mux(c.data(), a.data(), b.data(), y.data(), n);
    ASSERT_EQ(x, y);
  }
}

TEST_F(KernelEquivalence, ReductionsMatchScalar) {
  for (std::size_t n = 0; n < 70; ++n) {
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = random_samples(rng_, n);
      const auto b = random_samples(rng_, n);
      EXPECT_EQ(ref_.trace_stats(a.data(), n), simd_->trace_stats(a.data(), n)) << n;
      EXPECT_EQ(ref_.squared_distance(a.data(), b.data(), n), simd_->squared_distance(a.data(), b.data(), n));
    }
  }
}

TEST_F(KernelEquivalence, DeMutateBitIdentical) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n : {1, 4, 5, 25, 33}) {
    for (int rep = 0; rep < 50; ++rep) {
      std::vector<double> base(n), plus(n), minus(n), x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        base[i] = u(rng_);
        plus[i] = u(rng_);
        minus[i] = rep % 5 == 0 ? plus[i] : u(rng_);
      }
      ref_.de_mutate(base.data(), plus.data(), minus.data(), 0.7, x.data(), n);
      simd_->de_mutate(base.data(), plus.data(), minus.data(), 0.7, y.data(), n);
      ASSERT_EQ(0, std::memcmp(x.data(), y.data(), n * sizeof(double)));
    }
  }
}

TEST(ScalarKernels, SaturatesInsteadOfWrapping) {
  const auto& k = scalar_kernels();
  const std::int16_t a[] = {32767, -32768, 100, -32768, 7};
  const std::int16_t b[] = {1, -1, 0, -1, -2};
  std::int16_t out[5];
  k.arith(ArithOp::Add, Signedness::Signed, a, b, out, 5);
  EXPECT_EQ(out[0], 32767);
  EXPECT_EQ(out[1], -32768);
  k.arith(ArithOp::Div, Signedness::Signed, a, b, out, 5);
  EXPECT_EQ(out[2], 0) << "division by zero yields 0";
  EXPECT_EQ(out[3], 32767) << "-32768 / -1 saturates";
  EXPECT_EQ(out[4], -3) << "truncates toward zero";
  k.arith(ArithOp::Mul, Signedness::Signed, a, a, out, 5);
  EXPECT_EQ(out[0], 32767);
  EXPECT_EQ(out[1], 32767);

  const std::int16_t u1[] = {static_cast<std::int16_t>(65535), 10};
  const std::int16_t u2[] = {2, 20};
  k.arith(ArithOp::Add, Signedness::Unsigned, u1, u2, out, 2);
  EXPECT_EQ(static_cast<std::uint16_t>(out[0]), 65535);
  k.arith(ArithOp::Sub, Signedness::Unsigned, u1, u2, out, 2);
  EXPECT_EQ(out[1], 0);
  k.unary(UnaryOp::Abs, Signedness::Signed, a, out, 2);
  EXPECT_EQ(out[1], 32767);
}

TEST(ScalarKernels, TraceStatsDegenerateLengths) {
  const auto& k = scalar_kernels();
  const std::int32_t one[] = {5};
  const auto st = k.trace_stats(one, 1);
  EXPECT_EQ(st.min, 5);
  EXPECT_EQ(st.max, 5);
  EXPECT_EQ(st.max_increase, 0);
  EXPECT_EQ(st.max_decrease, 0);
  const std::int32_t s[] = {0, 5, 3, 10};
  const auto st4 = k.trace_stats(s, 4);
  EXPECT_EQ(st4.max_increase, 7);
  EXPECT_EQ(st4.max_decrease, 2);
  EXPECT_EQ(st4.sum, 18);
}

TEST(Dispatch, ActiveTableIsOneOfTheVariants) {
  const auto& k = active_kernels();
  EXPECT_TRUE(&k == &scalar_kernels() || &k == avx2_kernels());
}

}  // namespace
}  // namespace isbst::simd
