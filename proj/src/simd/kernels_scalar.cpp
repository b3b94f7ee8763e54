#include <algorithm>
#include <cstdint>

#include "isbst/simd/kernels.hpp"
#include "scalar_ops.hpp"

namespace isbst::simd {
namespace {

void arith(ArithOp op, Signedness sign, const std::int16_t* a, const std::int16_t* b,
           std::int16_t* out, std::size_t n) {
  scalar::arith(op, sign, a, b, out, n);
}

void unary(UnaryOp op, Signedness sign, const std::int16_t* a, std::int16_t* out, std::size_t n) {
  scalar::unary(op, sign, a, out, n);
}

void compare(CompareOp op, Signedness sign, const std::int16_t* a, const std::int16_t* b,
             std::int16_t* out, std::size_t n) {
  scalar::compare(op, sign, a, b, out, n);
}

void logic(LogicOp op, const std::int16_t* a, const std::int16_t* b, std::int16_t* out,
           std::size_t n) {
  scalar::logic(op, a, b, out, n);
}

void logic_not(const std::int16_t* a, std::int16_t* out, std::size_t n) {
  scalar::logic_not(a, out, n);
}

void mux(const std::int16_t* sel, const std::int16_t* f, const std::int16_t* t,
         std::int16_t* out, std::size_t n) {
  scalar::mux(sel, f, t, out, n);
}

void convert(Signedness from, Signedness to, std::int32_t lo, std::int32_t hi,
             const std::int16_t* in, std::int16_t* out, std::size_t n) {
  scalar::convert(from, to, lo, hi, in, out, n);
}

TraceStats trace_stats(const std::int32_t* s, std::size_t n) { return scalar::trace_stats(s, n); }

std::int64_t squared_distance(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
  return scalar::squared_distance(a, b, n);
}

void de_mutate(const double* base, const double* plus, const double* minus, double f,
               double* out, std::size_t n) {
  scalar::de_mutate(base, plus, minus, f, out, n);
}

constexpr LaneKernels kScalar{
    "scalar", arith, unary, compare, logic, logic_not, mux, convert,
    trace_stats, squared_distance, de_mutate,
};

}  // namespace

const LaneKernels& scalar_kernels() { return kScalar; }

}  // namespace isbst::simd
