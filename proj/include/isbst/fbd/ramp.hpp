#pragma once
// The Time Ramp function block: a rate-limited follower of Input with reset.
//
//   Input_0 LoopTm   U16   loop period in ms
//   Input_1 Reset    BOOL  force Output = ResetVal
//   Input_2 ResetVal S16
//   Input_3 Range    U16   span covered in IncTm / DecTm
//   Input_4 DecTm    U16   ms to move from Range to 0 (0 disables the limit)
//   Input_5 IncTm    U16   ms to move from 0 to Range (0 disables the limit)
//   Input_6 Input    S16   signal to be ramped
//   Output_7 Dec     BOOL  magnitude decreased this tick
//   Output_8 Pasv    BOOL  output unchanged, or reset
//   Output_9 Output  S16
//
// Per tick the output moves toward Input by at most
// sat(Range*LoopTm) / max(Tm, LoopTm), with Tm = IncTm when moving away from
// zero and DecTm when moving toward it. All arithmetic saturates at the
// 16-bit bounds of its type, exactly as the diagram blocks do.

#include <cstdint>
#include <span>
#include <vector>

#include "isbst/fbd/diagram.hpp"
#include "isbst/fbd/interpreter.hpp"

namespace isbst::fbd {

namespace channel {
inline constexpr int kLoopTm = 0;
inline constexpr int kReset = 1;
inline constexpr int kResetVal = 2;
inline constexpr int kRange = 3;
inline constexpr int kDecTm = 4;
inline constexpr int kIncTm = 5;
inline constexpr int kInput = 6;
inline constexpr int kDec = 7;
inline constexpr int kPasv = 8;
inline constexpr int kOutput = 9;
}  // namespace channel

inline constexpr int kRampInputCount = 7;
inline constexpr int kRampOutputCount = 3;

struct RampInputs {
  std::uint16_t loop_tm = 0;
  bool reset = false;
  std::int16_t reset_val = 0;
  std::uint16_t range = 0;
  std::uint16_t dec_tm = 0;
  std::uint16_t inc_tm = 0;
  std::int16_t input = 0;
};

struct RampState {
  std::int16_t prev_output = 0;
  bool prev_pasv = true;

  friend bool operator==(const RampState&, const RampState&) = default;
};

struct RampOutputs {
  bool dec = false;
  bool pasv = true;
  std::int16_t output = 0;
  RampState next;
};

RampOutputs ramp_tick(const RampState& state, const RampInputs& in);

// Folds ramp_tick over input traces (channel order as above), returning the
// three output traces.
TraceSet ramp_fold(std::span<const SignalTrace> inputs);

const std::vector<PortDecl>& ramp_input_decls();
const std::vector<PortDecl>& ramp_output_decls();

BlockDiagram build_ramp_diagram();

}  // namespace isbst::fbd
