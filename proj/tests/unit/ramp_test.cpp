#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "isbst/fbd/interpreter.hpp"
#include "isbst/fbd/ramp.hpp"
#include "test_util.hpp"

namespace isbst::fbd {
namespace {

TEST(RampTick, ResetForcesResetValue) {
  RampInputs in;
  in.reset = true;
  in.reset_val = 5;
  in.input = 1234;
  in.loop_tm = 10;
  const auto r = ramp_tick({-300, false}, in);
  EXPECT_EQ(r.output, 5);
  EXPECT_TRUE(r.pasv);
  EXPECT_FALSE(r.dec);
}

TEST(RampTick, StepIsRangeTimesLoopOverIncTime) {
  const RampInputs in{100, false, 0, 100, 1000, 1000, 100};
  const auto r = ramp_tick({0, true}, in);
  EXPECT_EQ(r.output, 10);
  EXPECT_FALSE(r.pasv);
  EXPECT_FALSE(r.dec);
}

TEST(RampTick, AlreadyAtTargetIsPassive) {
  const RampInputs in{100, false, 0, 100, 1000, 1000, 10};
  const auto r = ramp_tick({10, false}, in);
  EXPECT_EQ(r.output, 10);
  EXPECT_TRUE(r.pasv);
}

TEST(RampTick, ZeroIncTimeJumps) {
  const RampInputs in{100, false, 0, 100, 1000, 0, 77};
  EXPECT_EQ(ramp_tick({0, true}, in).output, 77);
}

TEST(RampTick, DecTimeGovernsMovesTowardZero) {
  // Toward zero from 100 with DecTm 500: step 100*100/500 = 20.
  const RampInputs in{100, false, 0, 100, 500, 1000, 0};
  const auto r = ramp_tick({100, false}, in);
  EXPECT_EQ(r.output, 80);
  EXPECT_TRUE(r.dec);
  // Short time constants clamp to LoopTm: the whole Range per tick.
  const RampInputs fast{100, false, 0, 100, 50, 50, 1000};
  EXPECT_EQ(ramp_tick({0, true}, fast).output, 100);
}

TEST(RampDiagram, ResetHeldGivesConstantResetValue) {
  const auto outs = execute(build_ramp_diagram(), testing::ramp_inputs(100, true, 5, 100, 1000, 1000, 999, 20));
  for (const auto v : outs[2].samples) EXPECT_EQ(v, 5);
  const auto one = execute(build_ramp_diagram(), testing::ramp_inputs(100, true, -7, 100, 1000, 1000, 999, 1));
  EXPECT_EQ(one[2].samples, std::vector<std::int32_t>{-7});
}

TEST(RampDiagram, AllZeroInputsAreAFixedPoint) {
  const auto outs = execute(build_ramp_diagram(), testing::ramp_inputs(0, false, 0, 0, 0, 0, 0, 30));
  for (std::size_t t = 0; t < 30; ++t) {
    EXPECT_EQ(outs[2].samples[t], 0);
    EXPECT_EQ(outs[1].samples[t], 1);
    EXPECT_EQ(outs[0].samples[t], 0);
  }
}

TEST(RampDiagram, EquivalentToReferenceFold) {
  const CompiledDiagram ramp(build_ramp_diagram());
  std::mt19937_64 rng(20240601);
  for (int rep = 0; rep < 2000; ++rep) {
    const auto in = testing::random_ramp_inputs(rng, 1 + rng() % 64);
    ASSERT_EQ(ramp.execute(in), ramp_fold(in)) << "rep " << rep;
  }
}

TEST(RampProperties, PasvIffUnchangedOrReset) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 500; ++rep) {
    const auto in = testing::random_ramp_inputs(rng, 40);
    const auto out = ramp_fold(in);
    std::int32_t prev = 0;
    for (std::size_t t = 0; t < 40; ++t) {
      const bool reset = in[channel::kReset].samples[t] != 0;
      const bool unchanged = out[2].samples[t] == prev;
      ASSERT_EQ(out[1].samples[t] != 0, unchanged || reset);
      prev = out[2].samples[t];
    }
  }
}

TEST(RampProperties, NoOvershootUnderConstantInput) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 500; ++rep) {
    auto in = testing::random_ramp_inputs(rng, 40);
    in[channel::kReset] = constant_trace(channel::kReset, SignalKind::Bool, 0, 40);
    const std::int32_t target = testing::draw_value(rng, SignalKind::S16);
    in[channel::kInput] = constant_trace(channel::kInput, SignalKind::S16, target, 40);
    const auto out = ramp_fold(in);
    std::int64_t gap = std::abs(std::int64_t{target});
    for (const auto v : out[2].samples) {
      const std::int64_t g = std::abs(std::int64_t{v} - target);
      ASSERT_LE(g, gap);
      gap = g;
    }
  }
}

}  // namespace
}  // namespace isbst::fbd
