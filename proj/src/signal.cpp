#include "isbst/signal.hpp"

#include <string>

namespace isbst {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidDiagram: return "invalid_diagram";
    case ErrorCode::kTypedInput: return "typed_input";
    case ErrorCode::kInvalidMutation: return "invalid_mutation";
    case ErrorCode::kUnknownVersion: return "unknown_version";
    case ErrorCode::kUnknownSession: return "unknown_session";
    case ErrorCode::kUnknownCandidate: return "unknown_candidate";
    case ErrorCode::kUnknownObjective: return "unknown_objective";
    case ErrorCode::kBusy: return "busy";
    case ErrorCode::kStopped: return "stopped";
    case ErrorCode::kStaleSequence: return "stale_sequence";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

std::string_view to_string(SignalKind kind) {
  switch (kind) {
    case SignalKind::U16: return "U16";
    case SignalKind::S16: return "S16";
    case SignalKind::Bool: return "BOOL";
  }
  return "?";
}

SignalKind signal_kind_from_string(std::string_view name) {
  if (name == "U16") return SignalKind::U16;
  if (name == "S16") return SignalKind::S16;
  if (name == "BOOL") return SignalKind::Bool;
  throw Error(ErrorCode::kInvalidArgument, "unknown signal kind '" + std::string(name) + "'");
}

SignalValue SignalValue::make(SignalKind kind, std::int64_t value) {
  if (value < kind_min(kind) || value > kind_max(kind)) {
    throw Error(ErrorCode::kTypedInput, "value " + std::to_string(value) + " outside " +
                                            std::string(to_string(kind)) + " range");
  }
  return {kind, static_cast<std::int32_t>(value)};
}

bool SignalTrace::in_range() const noexcept {
  const auto lo = kind_min(kind);
  const auto hi = kind_max(kind);
  return std::all_of(samples.begin(), samples.end(),
                     [&](std::int32_t v) { return v >= lo && v <= hi; });
}

SignalTrace constant_trace(int channel, SignalKind kind, std::int32_t value, std::size_t length) {
  return {channel, kind, std::vector<std::int32_t>(length, saturate(kind, value))};
}

}  // namespace isbst
