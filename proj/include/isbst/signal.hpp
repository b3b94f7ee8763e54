#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

#include "isbst/error.hpp"

namespace isbst {

enum class SignalKind : std::uint8_t { U16, S16, Bool };

std::string_view to_string(SignalKind kind);
SignalKind signal_kind_from_string(std::string_view name);

constexpr std::int32_t kind_min(SignalKind kind) {
  switch (kind) {
    case SignalKind::U16: return 0;
    case SignalKind::S16: return std::numeric_limits<std::int16_t>::min();
    case SignalKind::Bool: return 0;
  }
  return 0;
}

constexpr std::int32_t kind_max(SignalKind kind) {
  switch (kind) {
    case SignalKind::U16: return std::numeric_limits<std::uint16_t>::max();
    case SignalKind::S16: return std::numeric_limits<std::int16_t>::max();
    case SignalKind::Bool: return 1;
  }
  return 0;
}

constexpr bool is_numeric(SignalKind kind) { return kind != SignalKind::Bool; }

constexpr std::int32_t saturate(SignalKind kind, std::int64_t v) {
  return static_cast<std::int32_t>(std::clamp<std::int64_t>(v, kind_min(kind), kind_max(kind)));
}

// Lanes carry every kind as a 16-bit word: S16 as itself, U16 as its bit
// pattern, BOOL as 0/1.
constexpr std::int16_t to_lane(std::int32_t value) {
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(value));
}

constexpr std::int32_t from_lane(SignalKind kind, std::int16_t word) {
  switch (kind) {
    case SignalKind::U16: return static_cast<std::uint16_t>(word);
    case SignalKind::S16: return word;
    case SignalKind::Bool: return word != 0 ? 1 : 0;
  }
  return 0;
}

struct SignalValue {
  SignalKind kind = SignalKind::S16;
  std::int32_t value = 0;

  static SignalValue make(SignalKind kind, std::int64_t value);
  static SignalValue boolean(bool b) { return {SignalKind::Bool, b ? 1 : 0}; }

  friend bool operator==(const SignalValue&, const SignalValue&) = default;
};

// A fixed-length series for one SUT channel. Samples hold decoded values.
struct SignalTrace {
  int channel = 0;
  SignalKind kind = SignalKind::S16;
  std::vector<std::int32_t> samples;

  std::size_t length() const noexcept { return samples.size(); }
  bool in_range() const noexcept;

  friend bool operator==(const SignalTrace&, const SignalTrace&) = default;
};

SignalTrace constant_trace(int channel, SignalKind kind, std::int32_t value, std::size_t length);

}  // namespace isbst
