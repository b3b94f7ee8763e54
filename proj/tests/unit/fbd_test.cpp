#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>

#include "isbst/fbd/diagram.hpp"
#include "isbst/fbd/interpreter.hpp"
#include "isbst/fbd/ramp.hpp"
#include "test_util.hpp"

namespace isbst::fbd {
namespace {

BlockDiagram output_only(std::vector<Block> blocks, std::vector<Edge> edges) {
  BlockDiagram d;
  d.name = "t";
  d.inputs = ramp_input_decls();
  d.outputs = {{channel::kOutput, "Output", SignalKind::S16}};
  d.blocks = std::move(blocks);
  d.edges = std::move(edges);
  return d;
}

Block make(std::string id, OpKind op, SignalKind kind, std::int32_t value = 0) {
  Block b;
  b.id = std::move(id);
  b.op = op;
  b.kind = kind;
  b.value = value;
  return b;
}

TEST(Execute, ConstantBlockDrivesOutput) {
  const auto d = output_only({make("k", OpKind::Const, SignalKind::S16, 3)}, {{"k", "out:9", 0}});
  std::mt19937_64 rng(1);
  const auto outs = execute(d, testing::random_ramp_inputs(rng, 4));
  ASSERT_EQ(outs.size(), 1u);
  EXPECT_EQ(outs[0].channel, 9);
  EXPECT_EQ(outs[0].samples, (std::vector<std::int32_t>{3, 3, 3, 3}));
}

TEST(Execute, UnitDelayEmitsPreviousTick) {
  const auto d = output_only({make("one", OpKind::Const, SignalKind::S16, 1), make("z", OpKind::UnitDelay, SignalKind::S16, 0)},
                             {{"one", "z", 0}, {"z", "out:9", 0}});
  std::mt19937_64 rng(2);
  const auto outs = execute(d, testing::random_ramp_inputs(rng, 3));
  EXPECT_EQ(outs[0].samples, (std::vector<std::int32_t>{0, 1, 1}));
}

TEST(Execute, DelayFeedbackCounter) {
  // z' = z + 1, saturating.
  const auto d = output_only({make("one", OpKind::Const, SignalKind::S16, 1), make("z", OpKind::UnitDelay, SignalKind::S16, 32765),
                              make("inc", OpKind::Add, SignalKind::S16)},
                             {{"z", "inc", 0}, {"one", "inc", 1}, {"inc", "z", 0}, {"z", "out:9", 0}});
  std::mt19937_64 rng(3);
  const auto outs = execute(d, testing::random_ramp_inputs(rng, 5));
  EXPECT_EQ(outs[0].samples, (std::vector<std::int32_t>{32765, 32766, 32767, 32767, 32767}));
}

TEST(Execute, RejectsMistypedTrace) {
  const auto d = build_ramp_diagram();
  auto inputs = testing::ramp_inputs(100, false, 0, 100, 1000, 1000, 50, 4);
  inputs[channel::kReset].kind = SignalKind::S16;
  try {
    execute(d, inputs);
    FAIL() << "expected typed-input error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTypedInput);
  }
  inputs = testing::ramp_inputs(100, false, 0, 100, 1000, 1000, 50, 4);
  inputs[channel::kLoopTm].samples[1] = -1;
  EXPECT_THROW(execute(d, inputs), Error);
  inputs = testing::ramp_inputs(100, false, 0, 100, 1000, 1000, 50, 4);
  inputs.pop_back();
  EXPECT_THROW(execute(d, inputs), Error);
}

TEST(Validate, RejectsAlgebraicLoop) {
  const auto d = output_only({make("a", OpKind::Neg, SignalKind::S16), make("b", OpKind::Neg, SignalKind::S16)},
                             {{"a", "b", 0}, {"b", "a", 0}, {"b", "out:9", 0}});
  EXPECT_THROW(validate(d), Error);
}

TEST(Validate, RejectsKindMismatchAndDanglingPorts) {
  auto d = output_only({make("n", OpKind::Not, SignalKind::Bool)}, {{"in:6", "n", 0}, {"n", "out:9", 0}});
  EXPECT_THROW(validate(d), Error);
  d = output_only({make("a", OpKind::Add, SignalKind::S16)}, {{"in:6", "a", 0}, {"a", "out:9", 0}});
  EXPECT_THROW(validate(d), Error);
  d = output_only({make("k", OpKind::Const, SignalKind::S16, 1)}, {});
  EXPECT_THROW(validate(d), Error) << "output unconnected";
  d = output_only({make("k", OpKind::Const, SignalKind::U16, 70000)}, {{"k", "out:9", 0}});
  EXPECT_THROW(validate(d), Error);
}

TEST(Diagram, JsonRoundTripPreservesStructure) {
  const auto d = build_ramp_diagram();
  const auto back = diagram_from_json(nlohmann::json::parse(to_json(d).dump()));
  EXPECT_EQ(d, back);

  const auto path = std::filesystem::temp_directory_path() / "isbst_ramp_roundtrip.json";
  save_diagram(d, path);
  EXPECT_EQ(load_diagram(path), d);
  std::filesystem::remove(path);
}

TEST(Diagram, MalformedJsonIsInvalidDiagram) {
  try {
    diagram_from_json(nlohmann::json{{"inputs", 3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidDiagram);
  }
}

TEST(Execute, DeterministicAndInRange) {
  const CompiledDiagram ramp(build_ramp_diagram());
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const auto in = testing::random_ramp_inputs(rng, 1 + rng() % 60);
    const auto a = ramp.execute(in);
    const auto b = ramp.execute(in);
    ASSERT_EQ(a, b);
    for (const auto& t : a) ASSERT_TRUE(t.in_range());
  }
}

TEST(Execute, BatchMatchesSingleUnderEveryKernelTable) {
  const CompiledDiagram ramp(build_ramp_diagram());
  std::mt19937_64 rng(12);
  std::vector<TraceSet> batch;
  for (int i = 0; i < 37; ++i) batch.push_back(testing::random_ramp_inputs(rng, 50));
  std::vector<const simd::LaneKernels*> tables{&simd::scalar_kernels()};
  if (simd::avx2_kernels()) tables.push_back(simd::avx2_kernels());
  for (const auto* k : tables) {
    const auto outs = ramp.execute_batch(batch, *k);
    ASSERT_EQ(outs.size(), batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) EXPECT_EQ(outs[i], ramp.execute(batch[i])) << k->name;
  }
}

}  // namespace
}  // namespace isbst::fbd
