#include "isbst/fbd/ramp.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace isbst::fbd {
namespace {

std::int16_t sat_s16(std::int64_t v) { return static_cast<std::int16_t>(std::clamp<std::int64_t>(v, -32768, 32767)); }
std::uint16_t sat_u16(std::int64_t v) { return static_cast<std::uint16_t>(std::clamp<std::int64_t>(v, 0, 65535)); }

const SignalTrace& channel_trace(std::span<const SignalTrace> inputs, int ch) {
  const auto it = std::find_if(inputs.begin(), inputs.end(), [&](const SignalTrace& t) { return t.channel == ch; });
  if (it == inputs.end()) throw Error(ErrorCode::kTypedInput, "missing trace for Input_" + std::to_string(ch));
  const auto decl = std::find_if(ramp_input_decls().begin(), ramp_input_decls().end(),
                                  [&](const PortDecl& p) { return p.channel == ch; });
  if (it->kind != decl->kind || !it->in_range()) {
    throw Error(ErrorCode::kTypedInput, "Input_" + std::to_string(ch) + " has the wrong kind or range");
  }
  return *it;
}

}  // namespace

RampOutputs ramp_tick(const RampState& state, const RampInputs& in) {
  const std::int32_t prev = state.prev_output;

  const std::uint16_t span = sat_u16(std::int64_t{in.range} * in.loop_tm);
  const std::uint16_t inc_eff = std::max(in.inc_tm, in.loop_tm);
  const std::uint16_t dec_eff = std::max(in.dec_tm, in.loop_tm);
  const std::int16_t inc_step = sat_s16(inc_eff == 0 ? 0 : span / inc_eff);
  const std::int16_t dec_step = sat_s16(dec_eff == 0 ? 0 : span / dec_eff);

  const std::int16_t diff = sat_s16(std::int64_t{in.input} - prev);
  const bool away = (diff > 0 && prev >= 0) || (diff < 0 && prev <= 0);
  const bool unlimited = away ? in.inc_tm == 0 : in.dec_tm == 0;
  const std::int16_t step = away ? inc_step : dec_step;
  const std::int16_t limited =
      std::min<std::int16_t>(std::max<std::int16_t>(diff, sat_s16(-std::int32_t{step})), step);
  const std::int16_t delta = unlimited ? diff : limited;
  const std::int16_t moved = sat_s16(prev + std::int32_t{delta});

  RampOutputs out;
  out.output = in.reset ? in.reset_val : moved;
  out.pasv = out.output == prev || in.reset;
  const std::int16_t abs_out = sat_s16(std::abs(std::int32_t{out.output}));
  const std::int16_t abs_prev = sat_s16(std::abs(prev));
  out.dec = abs_out < abs_prev && !in.reset;
  out.next = {out.output, out.pasv};
  return out;
}

TraceSet ramp_fold(std::span<const SignalTrace> inputs) {
  const auto& loop = channel_trace(inputs, channel::kLoopTm);
  const auto& reset = channel_trace(inputs, channel::kReset);
  const auto& reset_val = channel_trace(inputs, channel::kResetVal);
  const auto& range = channel_trace(inputs, channel::kRange);
  const auto& dec_tm = channel_trace(inputs, channel::kDecTm);
  const auto& inc_tm = channel_trace(inputs, channel::kIncTm);
  const auto& input = channel_trace(inputs, channel::kInput);
  const std::size_t n = loop.length();
  for (const auto* t : {&reset, &reset_val, &range, &dec_tm, &inc_tm, &input}) {
    if (t->length() != n) throw Error(ErrorCode::kTypedInput, "input traces differ in length");
  }

  TraceSet out{{channel::kDec, SignalKind::Bool, std::vector<std::int32_t>(n)},
               {channel::kPasv, SignalKind::Bool, std::vector<std::int32_t>(n)},
               {channel::kOutput, SignalKind::S16, std::vector<std::int32_t>(n)}};
  RampState state;
  for (std::size_t t = 0; t < n; ++t) {
    const RampInputs in{static_cast<std::uint16_t>(loop.samples[t]), reset.samples[t] != 0,
                        static_cast<std::int16_t>(reset_val.samples[t]), static_cast<std::uint16_t>(range.samples[t]),
                        static_cast<std::uint16_t>(dec_tm.samples[t]), static_cast<std::uint16_t>(inc_tm.samples[t]),
                        static_cast<std::int16_t>(input.samples[t])};
    const auto r = ramp_tick(state, in);
    out[0].samples[t] = r.dec ? 1 : 0;
    out[1].samples[t] = r.pasv ? 1 : 0;
    out[2].samples[t] = r.output;
    state = r.next;
  }
  return out;
}

const std::vector<PortDecl>& ramp_input_decls() {
  static const std::vector<PortDecl> decls{
      {channel::kLoopTm, "LoopTm", SignalKind::U16},   {channel::kReset, "Reset", SignalKind::Bool},
      {channel::kResetVal, "ResetVal", SignalKind::S16}, {channel::kRange, "Range", SignalKind::U16},
      {channel::kDecTm, "DecTm", SignalKind::U16},     {channel::kIncTm, "IncTm", SignalKind::U16},
      {channel::kInput, "Input", SignalKind::S16},
  };
  return decls;
}

const std::vector<PortDecl>& ramp_output_decls() {
  static const std::vector<PortDecl> decls{
      {channel::kDec, "Dec", SignalKind::Bool},
      {channel::kPasv, "Pasv", SignalKind::Bool},
      {channel::kOutput, "Output", SignalKind::S16},
  };
  return decls;
}

BlockDiagram build_ramp_diagram() {
  using K = SignalKind;
  BlockDiagram d;
  d.name = "time_ramp";
  d.inputs = ramp_input_decls();
  d.outputs = ramp_output_decls();

  auto block = [&](std::string id, OpKind op, K kind, std::int32_t value = 0) {
    Block b;
    b.id = std::move(id);
    b.op = op;
    b.kind = kind;
    b.value = value;
    d.blocks.push_back(std::move(b));
  };
  auto saturate = [&](std::string id, K kind) {
    block(std::move(id), OpKind::Saturate, kind);
    d.blocks.back().lo = kind_min(kind);
    d.blocks.back().hi = kind_max(kind);
  };
  auto wire = [&](std::string from, std::string to, int port) {
    d.edges.push_back({std::move(from), std::move(to), port});
  };
  const auto in = [](int ch) { return input_endpoint(ch); };

  block("prev", OpKind::UnitDelay, K::S16, 0);

  // Per-tick step sizes.
  block("k_inc_zero", OpKind::Const, K::U16, 0);
  block("k_dec_zero", OpKind::Const, K::U16, 0);
  block("inc_zero", OpKind::Eq, K::U16);
  block("dec_zero", OpKind::Eq, K::U16);
  block("inc_eff", OpKind::Max, K::U16);
  block("dec_eff", OpKind::Max, K::U16);
  block("span", OpKind::Mul, K::U16);
  block("inc_step_u", OpKind::Div, K::U16);
  block("dec_step_u", OpKind::Div, K::U16);
  saturate("inc_step", K::S16);
  saturate("dec_step", K::S16);

  // Direction of travel relative to zero.
  block("diff", OpKind::Sub, K::S16);
  block("k_rise", OpKind::Const, K::S16, 0);
  block("k_fall", OpKind::Const, K::S16, 0);
  block("k_prev_nonneg", OpKind::Const, K::S16, 0);
  block("k_prev_nonpos", OpKind::Const, K::S16, 0);
  block("rising", OpKind::Gt, K::S16);
  block("falling", OpKind::Lt, K::S16);
  block("prev_nonneg", OpKind::Ge, K::S16);
  block("prev_nonpos", OpKind::Le, K::S16);
  block("rise_away", OpKind::And, K::Bool);
  block("fall_away", OpKind::And, K::Bool);
  block("away", OpKind::Or, K::Bool);

  // Rate limiting.
  block("unlimited", OpKind::Mux, K::Bool);
  block("step", OpKind::Mux, K::S16);
  block("neg_step", OpKind::Neg, K::S16);
  block("floor", OpKind::Max, K::S16);
  block("limited", OpKind::Min, K::S16);
  block("delta", OpKind::Mux, K::S16);
  block("moved", OpKind::Add, K::S16);
  block("out_mux", OpKind::Mux, K::S16);

  // Status flags.
  block("same", OpKind::Eq, K::S16);
  block("pasv", OpKind::Or, K::Bool);
  block("abs_out", OpKind::Abs, K::S16);
  block("abs_prev", OpKind::Abs, K::S16);
  block("shrank", OpKind::Lt, K::S16);
  block("no_reset", OpKind::Not, K::Bool);
  block("dec", OpKind::And, K::Bool);

  wire("out_mux", "prev", 0);

  wire(in(channel::kIncTm), "inc_zero", 0);
  wire("k_inc_zero", "inc_zero", 1);
  wire(in(channel::kDecTm), "dec_zero", 0);
  wire("k_dec_zero", "dec_zero", 1);
  wire(in(channel::kIncTm), "inc_eff", 0);
  wire(in(channel::kLoopTm), "inc_eff", 1);
  wire(in(channel::kDecTm), "dec_eff", 0);
  wire(in(channel::kLoopTm), "dec_eff", 1);
  wire(in(channel::kRange), "span", 0);
  wire(in(channel::kLoopTm), "span", 1);
  wire("span", "inc_step_u", 0);
  wire("inc_eff", "inc_step_u", 1);
  wire("span", "dec_step_u", 0);
  wire("dec_eff", "dec_step_u", 1);
  wire("inc_step_u", "inc_step", 0);
  wire("dec_step_u", "dec_step", 0);

  wire(in(channel::kInput), "diff", 0);
  wire("prev", "diff", 1);
  wire("diff", "rising", 0);
  wire("k_rise", "rising", 1);
  wire("diff", "falling", 0);
  wire("k_fall", "falling", 1);
  wire("prev", "prev_nonneg", 0);
  wire("k_prev_nonneg", "prev_nonneg", 1);
  wire("prev", "prev_nonpos", 0);
  wire("k_prev_nonpos", "prev_nonpos", 1);
  wire("rising", "rise_away", 0);
  wire("prev_nonneg", "rise_away", 1);
  wire("falling", "fall_away", 0);
  wire("prev_nonpos", "fall_away", 1);
  wire("rise_away", "away", 0);
  wire("fall_away", "away", 1);

  wire("away", "unlimited", 0);
  wire("dec_zero", "unlimited", 1);
  wire("inc_zero", "unlimited", 2);
  wire("away", "step", 0);
  wire("dec_step", "step", 1);
  wire("inc_step", "step", 2);
  wire("step", "neg_step", 0);
  wire("diff", "floor", 0);
  wire("neg_step", "floor", 1);
  wire("floor", "limited", 0);
  wire("step", "limited", 1);
  wire("unlimited", "delta", 0);
  wire("limited", "delta", 1);
  wire("diff", "delta", 2);
  wire("prev", "moved", 0);
  wire("delta", "moved", 1);
  wire(in(channel::kReset), "out_mux", 0);
  wire("moved", "out_mux", 1);
  wire(in(channel::kResetVal), "out_mux", 2);

  wire("out_mux", "same", 0);
  wire("prev", "same", 1);
  wire("same", "pasv", 0);
  wire(in(channel::kReset), "pasv", 1);
  wire("out_mux", "abs_out", 0);
  wire("prev", "abs_prev", 0);
  wire("abs_out", "shrank", 0);
  wire("abs_prev", "shrank", 1);
  wire(in(channel::kReset), "no_reset", 0);
  wire("shrank", "dec", 0);
  wire("no_reset", "dec", 1);

  wire("dec", output_endpoint(channel::kDec), 0);
  wire("pasv", output_endpoint(channel::kPasv), 0);
  wire("out_mux", output_endpoint(channel::kOutput), 0);

  validate(d);
  return d;
}

}  // namespace isbst::fbd
