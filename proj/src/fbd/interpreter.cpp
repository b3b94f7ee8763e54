#include "isbst/fbd/interpreter.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace isbst::fbd {
namespace {

constexpr std::size_t kLaneBlock = 16;

simd::Signedness signedness(SignalKind kind) {
  return kind == SignalKind::S16 ? simd::Signedness::Signed : simd::Signedness::Unsigned;
}

simd::ArithOp arith_op(OpKind op) {
  switch (op) {
    case OpKind::Add: return simd::ArithOp::Add;
    case OpKind::Sub: return simd::ArithOp::Sub;
    case OpKind::Mul: return simd::ArithOp::Mul;
    case OpKind::Div: return simd::ArithOp::Div;
    case OpKind::Min: return simd::ArithOp::Min;
    default: return simd::ArithOp::Max;
  }
}

simd::CompareOp compare_op(OpKind op) {
  switch (op) {
    case OpKind::Lt: return simd::CompareOp::Lt;
    case OpKind::Le: return simd::CompareOp::Le;
    case OpKind::Gt: return simd::CompareOp::Gt;
    case OpKind::Ge: return simd::CompareOp::Ge;
    case OpKind::Eq: return simd::CompareOp::Eq;
    default: return simd::CompareOp::Ne;
  }
}

simd::LogicOp logic_op(OpKind op) {
  switch (op) {
    case OpKind::And: return simd::LogicOp::And;
    case OpKind::Or: return simd::LogicOp::Or;
    default: return simd::LogicOp::Xor;
  }
}

[[noreturn]] void typed_input(const std::string& what) { throw Error(ErrorCode::kTypedInput, what); }

}  // namespace

CompiledDiagram::CompiledDiagram(BlockDiagram diagram) : diagram_(std::move(diagram)) {
  validate(diagram_);

  std::map<std::string, int> slot_of;
  int next = 0;
  for (const auto& p : diagram_.inputs) slot_of[input_endpoint(p.channel)] = next++;
  for (const auto& b : diagram_.blocks) slot_of[b.id] = next++;
  slot_count_ = next;

  std::map<std::pair<std::string, int>, int> driver;
  for (const auto& e : diagram_.edges) driver[{e.to, e.port}] = slot_of.at(e.from);

  for (const auto i : evaluation_order(diagram_)) {
    const auto& b = diagram_.blocks[i];
    const int slot = slot_of.at(b.id);
    if (b.op == OpKind::Const) {
      constants_.emplace_back(slot, to_lane(b.value));
      continue;
    }
    if (b.op == OpKind::UnitDelay) {
      delays_.push_back({slot, driver.at({b.id, 0}), to_lane(b.value)});
      continue;
    }
    Node n{};
    n.op = b.op;
    n.kind = b.kind;
    n.sign = signedness(b.kind);
    n.from = n.sign;
    n.value = b.value;
    n.lo = b.lo;
    n.hi = b.hi;
    n.out = slot;
    for (int p = 0; p < arity(b.op); ++p) n.in[p] = driver.at({b.id, p});
    if (b.op == OpKind::Saturate) {
      const auto& src = *std::find_if(diagram_.edges.begin(), diagram_.edges.end(),
                                      [&](const Edge& e) { return e.to == b.id; });
      n.from = signedness(*diagram_.source_kind(src.from));
      n.lo = std::max(b.lo, kind_min(b.kind));
      n.hi = std::min(b.hi, kind_max(b.kind));
    }
    nodes_.push_back(n);
  }
  for (const auto& o : diagram_.outputs) {
    outputs_.push_back({o.channel, o.kind, driver.at({output_endpoint(o.channel), 0})});
  }
}

// Returns, for each declared input, the index of the matching trace.
std::vector<std::size_t> CompiledDiagram::check_inputs(const TraceSet& inputs, std::size_t& length) const {
  if (inputs.size() != diagram_.inputs.size()) {
    typed_input("expected " + std::to_string(diagram_.inputs.size()) + " input traces, got " +
                std::to_string(inputs.size()));
  }
  std::vector<std::size_t> index(diagram_.inputs.size());
  for (std::size_t d = 0; d < diagram_.inputs.size(); ++d) {
    const auto& decl = diagram_.inputs[d];
    const auto it = std::find_if(inputs.begin(), inputs.end(),
                                 [&](const SignalTrace& t) { return t.channel == decl.channel; });
    if (it == inputs.end()) typed_input("missing trace for Input_" + std::to_string(decl.channel));
    if (it->kind != decl.kind) {
      typed_input("Input_" + std::to_string(decl.channel) + " must be " + std::string(to_string(decl.kind)) +
                  ", got " + std::string(to_string(it->kind)));
    }
    if (!it->in_range()) typed_input("Input_" + std::to_string(decl.channel) + " has out-of-range samples");
    if (d == 0) length = it->length();
    if (it->length() != length) typed_input("input traces differ in length");
    index[d] = static_cast<std::size_t>(it - inputs.begin());
  }
  return index;
}

TraceSet CompiledDiagram::execute(std::span<const SignalTrace> inputs) const {
  const TraceSet one(inputs.begin(), inputs.end());
  return std::move(execute_batch(std::span(&one, 1), simd::scalar_kernels()).front());
}

std::vector<TraceSet> CompiledDiagram::execute_batch(std::span<const TraceSet> batch,
                                                     const simd::LaneKernels& k) const {
  if (batch.empty()) return {};
  std::size_t ticks = 0;
  std::vector<std::vector<std::size_t>> order;
  order.reserve(batch.size());
  for (const auto& inputs : batch) {
    std::size_t len = 0;
    order.push_back(check_inputs(inputs, len));
    if (&inputs == &batch.front()) ticks = len;
    if (len != ticks) typed_input("batch traces differ in length");
  }

  const std::size_t lanes = batch.size();
  const std::size_t width = (lanes + kLaneBlock - 1) / kLaneBlock * kLaneBlock;
  std::vector<std::int16_t> values(static_cast<std::size_t>(slot_count_) * width, 0);
  auto slot = [&](int s) { return values.data() + static_cast<std::size_t>(s) * width; };

  for (const auto& [s, word] : constants_) std::fill_n(slot(s), width, word);
  std::vector<std::int16_t> state(delays_.size() * width);
  for (std::size_t d = 0; d < delays_.size(); ++d) {
    std::fill_n(state.data() + d * width, width, delays_[d].init);
  }

  std::vector<TraceSet> result(lanes);
  for (auto& outs : result) {
    for (const auto& o : outputs_) outs.push_back({o.channel, o.kind, std::vector<std::int32_t>(ticks)});
  }

  for (std::size_t t = 0; t < ticks; ++t) {
    for (std::size_t in = 0; in < diagram_.inputs.size(); ++in) {
      auto* dst = slot(static_cast<int>(in));
      for (std::size_t l = 0; l < lanes; ++l) dst[l] = to_lane(batch[l][order[l][in]].samples[t]);
    }
    for (std::size_t d = 0; d < delays_.size(); ++d) {
      std::copy_n(state.data() + d * width, width, slot(delays_[d].slot));
    }
    for (const auto& n : nodes_) {
      auto* out = slot(n.out);
      switch (n.op) {
        case OpKind::Add:
        case OpKind::Sub:
        case OpKind::Mul:
        case OpKind::Div:
        case OpKind::Min:
        case OpKind::Max:
          k.arith(arith_op(n.op), n.sign, slot(n.in[0]), slot(n.in[1]), out, width);
          break;
        case OpKind::Abs:
          k.unary(simd::UnaryOp::Abs, n.sign, slot(n.in[0]), out, width);
          break;
        case OpKind::Neg:
          k.unary(simd::UnaryOp::Neg, n.sign, slot(n.in[0]), out, width);
          break;
        case OpKind::Lt:
        case OpKind::Le:
        case OpKind::Gt:
        case OpKind::Ge:
        case OpKind::Eq:
        case OpKind::Ne:
          k.compare(compare_op(n.op), n.sign, slot(n.in[0]), slot(n.in[1]), out, width);
          break;
        case OpKind::And:
        case OpKind::Or:
        case OpKind::Xor:
          k.logic(logic_op(n.op), slot(n.in[0]), slot(n.in[1]), out, width);
          break;
        case OpKind::Not:
          k.logic_not(slot(n.in[0]), out, width);
          break;
        case OpKind::Mux:
          k.mux(slot(n.in[0]), slot(n.in[1]), slot(n.in[2]), out, width);
          break;
        case OpKind::Saturate:
          k.convert(n.from, n.sign, n.lo, n.hi, slot(n.in[0]), out, width);
          break;
        case OpKind::Const:
        case OpKind::UnitDelay:
          break;
      }
    }
    for (std::size_t o = 0; o < outputs_.size(); ++o) {
      const auto* src = slot(outputs_[o].slot);
      for (std::size_t l = 0; l < lanes; ++l) {
        result[l][o].samples[t] = from_lane(outputs_[o].kind, src[l]);
      }
    }
    for (std::size_t d = 0; d < delays_.size(); ++d) {
      std::copy_n(slot(delays_[d].source), width, state.data() + d * width);
    }
  }
  return result;
}

TraceSet execute(const BlockDiagram& diagram, std::span<const SignalTrace> inputs) {
  return CompiledDiagram(diagram).execute(inputs);
}

const SignalTrace& find_trace(const TraceSet& traces, int channel) {
  for (const auto& t : traces) {
    if (t.channel == channel) return t;
  }
  throw Error(ErrorCode::kInvalidArgument, "no trace for channel " + std::to_string(channel));
}

}  // namespace isbst::fbd
