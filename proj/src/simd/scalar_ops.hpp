#pragma once
// Scalar reference semantics. Included by every kernel TU; the anonymous
// namespace keeps each TU's copy separate so the AVX2-compiled one can never
// be picked by the linker for the scalar table.

#include <algorithm>
#include <cstdint>
#include <limits>

#include "isbst/simd/kernels.hpp"

namespace isbst::simd::scalar {
namespace {

inline std::int32_t load(Signedness s, std::int16_t w) {
  return s == Signedness::Signed ? std::int32_t{w} : std::int32_t{static_cast<std::uint16_t>(w)};
}

inline std::int16_t store(Signedness s, std::int64_t v) {
  if (s == Signedness::Signed) {
    return static_cast<std::int16_t>(std::clamp<std::int64_t>(v, -32768, 32767));
  }
  return static_cast<std::int16_t>(static_cast<std::uint16_t>(std::clamp<std::int64_t>(v, 0, 65535)));
}

inline std::int16_t arith1(ArithOp op, Signedness s, std::int16_t wa, std::int16_t wb) {
  const std::int64_t a = load(s, wa);
  const std::int64_t b = load(s, wb);
  switch (op) {
    case ArithOp::Add: return store(s, a + b);
    case ArithOp::Sub: return store(s, a - b);
    case ArithOp::Mul: return store(s, a * b);
    case ArithOp::Div: return b == 0 ? std::int16_t{0} : store(s, a / b);
    case ArithOp::Min: return store(s, std::min(a, b));
    case ArithOp::Max: return store(s, std::max(a, b));
  }
  return 0;
}

inline void arith(ArithOp op, Signedness s, const std::int16_t* a, const std::int16_t* b,
                  std::int16_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = arith1(op, s, a[i], b[i]);
}

inline void unary(UnaryOp op, Signedness s, const std::int16_t* a, std::int16_t* out,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t v = load(s, a[i]);
    out[i] = store(s, op == UnaryOp::Abs ? (v < 0 ? -v : v) : -v);
  }
}

inline bool compare1(CompareOp op, std::int32_t a, std::int32_t b) {
  switch (op) {
    case CompareOp::Lt: return a < b;
    case CompareOp::Le: return a <= b;
    case CompareOp::Gt: return a > b;
    case CompareOp::Ge: return a >= b;
    case CompareOp::Eq: return a == b;
    case CompareOp::Ne: return a != b;
  }
  return false;
}

inline void compare(CompareOp op, Signedness s, const std::int16_t* a, const std::int16_t* b,
                    std::int16_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = compare1(op, load(s, a[i]), load(s, b[i])) ? 1 : 0;
}

inline void logic(LogicOp op, const std::int16_t* a, const std::int16_t* b, std::int16_t* out,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const bool x = a[i] != 0;
    const bool y = b[i] != 0;
    bool r = false;
    switch (op) {
      case LogicOp::And: r = x && y; break;
      case LogicOp::Or: r = x || y; break;
      case LogicOp::Xor: r = x != y; break;
    }
    out[i] = r ? 1 : 0;
  }
}

inline void logic_not(const std::int16_t* a, std::int16_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] != 0 ? 0 : 1;
}

inline void mux(const std::int16_t* sel, const std::int16_t* f, const std::int16_t* t,
                std::int16_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = sel[i] != 0 ? t[i] : f[i];
}

inline void convert(Signedness from, Signedness to, std::int32_t lo, std::int32_t hi,
                    const std::int16_t* in, std::int16_t* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t v = std::clamp<std::int64_t>(load(from, in[i]), lo, hi);
    out[i] = store(to, v);
  }
}

inline TraceStats trace_stats(const std::int32_t* s, std::size_t n) {
  TraceStats st;
  if (n == 0) return st;
  st.min = st.max = s[0];
  st.sum = s[0];
  if (n >= 2) {
    st.max_increase = std::numeric_limits<std::int32_t>::min();
    st.max_decrease = std::numeric_limits<std::int32_t>::min();
  }
  for (std::size_t i = 1; i < n; ++i) {
    st.min = std::min(st.min, s[i]);
    st.max = std::max(st.max, s[i]);
    st.sum += s[i];
    const std::int32_t d = s[i] - s[i - 1];
    st.max_increase = std::max(st.max_increase, d);
    st.max_decrease = std::max(st.max_decrease, -d);
  }
  return st;
}

inline std::int64_t squared_distance(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t d = std::int64_t{a[i]} - b[i];
    acc += d * d;
  }
  return acc;
}

inline double clamp_unit(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline void de_mutate(const double* base, const double* plus, const double* minus, double f,
                      double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = plus[i] - minus[i];
    const double scaled = f * diff;
    out[i] = clamp_unit(base[i] + scaled);
  }
}

}  // namespace
}  // namespace isbst::simd::scalar
