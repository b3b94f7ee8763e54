#pragma once
// Data-parallel kernels behind the FBD interpreter, the objective scorers,
// the trace distances and the DE vector update.
//
// Every kernel exists as a scalar reference and, where the CPU allows, an
// AVX2 variant. The variants are required to be bit-identical: integer lanes
// use saturating 16-bit semantics and the floating kernels are elementwise
// without contraction, so results never depend on which table is active.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace isbst::simd {

enum class Signedness : std::uint8_t { Signed, Unsigned };

enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div, Min, Max };
enum class UnaryOp : std::uint8_t { Abs, Neg };
enum class CompareOp : std::uint8_t { Lt, Le, Gt, Ge, Eq, Ne };
enum class LogicOp : std::uint8_t { And, Or, Xor };

// Summary statistics of an integer trace, all computed in one pass.
struct TraceStats {
  std::int32_t min = 0;
  std::int32_t max = 0;
  std::int64_t sum = 0;
  // Largest s[i+1]-s[i] and s[i]-s[i+1]; zero when fewer than two samples.
  std::int32_t max_increase = 0;
  std::int32_t max_decrease = 0;

  friend bool operator==(const TraceStats&, const TraceStats&) = default;
};

struct LaneKernels {
  std::string_view name;

  // out[i] = a[i] op b[i], saturating within the 16-bit range of `sign`.
  // Division truncates toward zero and yields 0 for a zero divisor.
  void (*arith)(ArithOp op, Signedness sign, const std::int16_t* a, const std::int16_t* b,
                std::int16_t* out, std::size_t n);
  void (*unary)(UnaryOp op, Signedness sign, const std::int16_t* a, std::int16_t* out,
                std::size_t n);
  // Produces 0/1 words.
  void (*compare)(CompareOp op, Signedness sign, const std::int16_t* a, const std::int16_t* b,
                  std::int16_t* out, std::size_t n);
  void (*logic)(LogicOp op, const std::int16_t* a, const std::int16_t* b, std::int16_t* out,
                std::size_t n);
  void (*logic_not)(const std::int16_t* a, std::int16_t* out, std::size_t n);
  // out[i] = sel[i] ? if_true[i] : if_false[i]
  void (*mux)(const std::int16_t* sel, const std::int16_t* if_false, const std::int16_t* if_true,
              std::int16_t* out, std::size_t n);
  // Reinterprets `in` under `from`, clamps to [lo, hi] intersected with the
  // range of `to`, and stores it as a `to` word.
  void (*convert)(Signedness from, Signedness to, std::int32_t lo, std::int32_t hi,
                  const std::int16_t* in, std::int16_t* out, std::size_t n);

  TraceStats (*trace_stats)(const std::int32_t* s, std::size_t n);
  // Exact sum of squared differences.
  std::int64_t (*squared_distance)(const std::int32_t* a, const std::int32_t* b, std::size_t n);
  // out = clamp(base + f * (plus - minus), 0, 1)
  void (*de_mutate)(const double* base, const double* plus, const double* minus, double f,
                    double* out, std::size_t n);
};

const LaneKernels& scalar_kernels();
// nullptr when the build or the running CPU lacks AVX2.
const LaneKernels* avx2_kernels();

// The table selected at first use: AVX2 when available unless the
// ISBST_SIMD environment variable is set to "scalar".
const LaneKernels& active_kernels();

}  // namespace isbst::simd
