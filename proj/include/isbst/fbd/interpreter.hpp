#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "isbst/fbd/diagram.hpp"
#include "isbst/signal.hpp"
#include "isbst/simd/kernels.hpp"

namespace isbst::fbd {

using TraceSet = std::vector<SignalTrace>;

// A validated diagram lowered to slot-indexed nodes. Execution evaluates one
// block at a time across a batch of independent traces (one lane each), so
// the inner loops are the lane kernels.
class CompiledDiagram {
 public:
  explicit CompiledDiagram(BlockDiagram diagram);

  const BlockDiagram& diagram() const noexcept { return diagram_; }

  // Inputs are matched to declared channels; each must carry the declared
  // kind, stay within range, and share one length. Returns one trace per
  // declared output, in declaration order.
  TraceSet execute(std::span<const SignalTrace> inputs) const;

  std::vector<TraceSet> execute_batch(std::span<const TraceSet> batch,
                                      const simd::LaneKernels& kernels = simd::active_kernels()) const;

 private:
  struct Node {
    OpKind op;
    SignalKind kind;
    simd::Signedness sign;
    simd::Signedness from;  // SATURATE source
    std::int32_t value;
    std::int32_t lo;
    std::int32_t hi;
    int in[3];
    int out;
  };
  struct Delay {
    int slot;
    int source;
    std::int16_t init;
  };
  struct Output {
    int channel;
    SignalKind kind;
    int slot;
  };

  std::vector<std::size_t> check_inputs(const TraceSet& inputs, std::size_t& length) const;

  BlockDiagram diagram_;
  std::vector<Node> nodes_;  // evaluation order, excluding CONST and UNIT_DELAY
  std::vector<std::pair<int, std::int16_t>> constants_;
  std::vector<Delay> delays_;
  std::vector<Output> outputs_;
  int slot_count_ = 0;
};

TraceSet execute(const BlockDiagram& diagram, std::span<const SignalTrace> inputs);

// Trace carrying `channel`; throws kInvalidArgument when absent.
const SignalTrace& find_trace(const TraceSet& traces, int channel);

}  // namespace isbst::fbd
