// Compiled with -mavx2. Nothing in here may run before active_kernels() has
// confirmed AVX2 support on the executing CPU.

#include <immintrin.h>

#include <algorithm>
#include <cstdint>

#include "isbst/simd/kernels.hpp"
#include "scalar_ops.hpp"

namespace isbst::simd {
namespace {

constexpr std::size_t kW16 = 16;
constexpr std::size_t kW32 = 8;
constexpr std::size_t kW64 = 4;

inline __m256i load16(const std::int16_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}
inline void store16(std::int16_t* p, __m256i v) {
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(p), v);
}
inline __m256i load32(const std::int32_t* p) {
  return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
}

inline __m256i widen_lo(Signedness s, __m256i v) {
  const __m128i half = _mm256_castsi256_si128(v);
  return s == Signedness::Signed ? _mm256_cvtepi16_epi32(half) : _mm256_cvtepu16_epi32(half);
}
inline __m256i widen_hi(Signedness s, __m256i v) {
  const __m128i half = _mm256_extracti128_si256(v, 1);
  return s == Signedness::Signed ? _mm256_cvtepi16_epi32(half) : _mm256_cvtepu16_epi32(half);
}

// Packs two vectors of eight 32-bit values (elements 0..7, 8..15) back into
// sixteen saturated words in order.
inline __m256i narrow(Signedness s, __m256i lo, __m256i hi) {
  const __m256i packed =
      s == Signedness::Signed ? _mm256_packs_epi32(lo, hi) : _mm256_packus_epi32(lo, hi);
  return _mm256_permute4x64_epi64(packed, 0xD8);
}

inline __m256i flip_sign(__m256i v) { return _mm256_xor_si256(v, _mm256_set1_epi16(-32768)); }

// Float division is exact after truncation for operands below 2^24.
inline __m256i div_half(__m256i a32, __m256i b32) {
  const __m256 q = _mm256_div_ps(_mm256_cvtepi32_ps(a32), _mm256_cvtepi32_ps(b32));
  const __m256i zero_div = _mm256_cmpeq_epi32(b32, _mm256_setzero_si256());
  return _mm256_andnot_si256(zero_div, _mm256_cvttps_epi32(q));
}

__m256i arith16(ArithOp op, Signedness s, __m256i a, __m256i b) {
  const bool sg = s == Signedness::Signed;
  switch (op) {
    case ArithOp::Add: return sg ? _mm256_adds_epi16(a, b) : _mm256_adds_epu16(a, b);
    case ArithOp::Sub: return sg ? _mm256_subs_epi16(a, b) : _mm256_subs_epu16(a, b);
    case ArithOp::Min: return sg ? _mm256_min_epi16(a, b) : _mm256_min_epu16(a, b);
    case ArithOp::Max: return sg ? _mm256_max_epi16(a, b) : _mm256_max_epu16(a, b);
    case ArithOp::Mul: {
      const __m256i lo = _mm256_mullo_epi16(a, b);
      if (sg) {
        const __m256i hi = _mm256_mulhi_epi16(a, b);
        return _mm256_packs_epi32(_mm256_unpacklo_epi16(lo, hi), _mm256_unpackhi_epi16(lo, hi));
      }
      const __m256i hi = _mm256_mulhi_epu16(a, b);
      const __m256i overflow =
          _mm256_xor_si256(_mm256_cmpeq_epi16(hi, _mm256_setzero_si256()), _mm256_set1_epi16(-1));
      return _mm256_or_si256(lo, overflow);
    }
    case ArithOp::Div:
      return narrow(s, div_half(widen_lo(s, a), widen_lo(s, b)),
                    div_half(widen_hi(s, a), widen_hi(s, b)));
  }
  return a;
}

void arith(ArithOp op, Signedness s, const std::int16_t* a, const std::int16_t* b,
           std::int16_t* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kW16 <= n; i += kW16) store16(out + i, arith16(op, s, load16(a + i), load16(b + i)));
  scalar::arith(op, s, a + i, b + i, out + i, n - i);
}

void unary(UnaryOp op, Signedness s, const std::int16_t* a, std::int16_t* out, std::size_t n) {
  const __m256i zero = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + kW16 <= n; i += kW16) {
    const __m256i v = load16(a + i);
    __m256i r;
    if (s == Signedness::Signed) {
      r = op == UnaryOp::Abs ? _mm256_min_epu16(_mm256_abs_epi16(v), _mm256_set1_epi16(32767))
                             : _mm256_subs_epi16(zero, v);
    } else {
      r = op == UnaryOp::Abs ? v : _mm256_subs_epu16(zero, v);
    }
    store16(out + i, r);
  }
  scalar::unary(op, s, a + i, out + i, n - i);
}

void compare(CompareOp op, Signedness s, const std::int16_t* a, const std::int16_t* b,
             std::int16_t* out, std::size_t n) {
  const __m256i one = _mm256_set1_epi16(1);
  std::size_t i = 0;
  for (; i + kW16 <= n; i += kW16) {
    __m256i x = load16(a + i);
    __m256i y = load16(b + i);
    if (s == Signedness::Unsigned) {
      x = flip_sign(x);
      y = flip_sign(y);
    }
    __m256i m;
    switch (op) {
      case CompareOp::Lt: m = _mm256_cmpgt_epi16(y, x); break;
      case CompareOp::Gt: m = _mm256_cmpgt_epi16(x, y); break;
      case CompareOp::Le: m = _mm256_andnot_si256(_mm256_cmpgt_epi16(x, y), _mm256_set1_epi16(-1)); break;
      case CompareOp::Ge: m = _mm256_andnot_si256(_mm256_cmpgt_epi16(y, x), _mm256_set1_epi16(-1)); break;
      case CompareOp::Eq: m = _mm256_cmpeq_epi16(x, y); break;
      case CompareOp::Ne: m = _mm256_andnot_si256(_mm256_cmpeq_epi16(x, y), _mm256_set1_epi16(-1)); break;
      default: m = _mm256_setzero_si256(); break;
    }
    store16(out + i, _mm256_and_si256(m, one));
  }
  scalar::compare(op, s, a + i, b + i, out + i, n - i);
}

inline __m256i truth(__m256i v) {
  return _mm256_andnot_si256(_mm256_cmpeq_epi16(v, _mm256_setzero_si256()), _mm256_set1_epi16(1));
}

void logic(LogicOp op, const std::int16_t* a, const std::int16_t* b, std::int16_t* out,
           std::size_t n) {
  std::size_t i = 0;
  for (; i + kW16 <= n; i += kW16) {
    const __m256i x = truth(load16(a + i));
    const __m256i y = truth(load16(b + i));
    __m256i r;
    switch (op) {
      case LogicOp::And: r = _mm256_and_si256(x, y); break;
      case LogicOp::Or: r = _mm256_or_si256(x, y); break;
      case LogicOp::Xor: r = _mm256_xor_si256(x, y); break;
      default: r = _mm256_setzero_si256(); break;
    }
    store16(out + i, r);
  }
  scalar::logic(op, a + i, b + i, out + i, n - i);
}

void logic_not(const std::int16_t* a, std::int16_t* out, std::size_t n) {
  const __m256i one = _mm256_set1_epi16(1);
  std::size_t i = 0;
  for (; i + kW16 <= n; i += kW16) {
    store16(out + i, _mm256_and_si256(_mm256_cmpeq_epi16(load16(a + i), _mm256_setzero_si256()), one));
  }
  scalar::logic_not(a + i, out + i, n - i);
}

void mux(const std::int16_t* sel, const std::int16_t* f, const std::int16_t* t, std::int16_t* out,
         std::size_t n) {
  std::size_t i = 0;
  for (; i + kW16 <= n; i += kW16) {
    const __m256i pick_false = _mm256_cmpeq_epi16(load16(sel + i), _mm256_setzero_si256());
    store16(out + i, _mm256_blendv_epi8(load16(t + i), load16(f + i), pick_false));
  }
  scalar::mux(sel + i, f + i, t + i, out + i, n - i);
}

void convert(Signedness from, Signedness to, std::int32_t lo, std::int32_t hi,
             const std::int16_t* in, std::int16_t* out, std::size_t n) {
  const __m256i vlo = _mm256_set1_epi32(lo);
  const __m256i vhi = _mm256_set1_epi32(hi);
  std::size_t i = 0;
  for (; i + kW16 <= n; i += kW16) {
    const __m256i v = load16(in + i);
    const __m256i a = _mm256_min_epi32(_mm256_max_epi32(widen_lo(from, v), vlo), vhi);
    const __m256i b = _mm256_min_epi32(_mm256_max_epi32(widen_hi(from, v), vlo), vhi);
    store16(out + i, narrow(to, a, b));
  }
  scalar::convert(from, to, lo, hi, in + i, out + i, n - i);
}

inline std::int32_t hmin32(__m256i v) {
  alignas(32) std::int32_t buf[kW32];
  _mm256_store_si256(reinterpret_cast<__m256i*>(buf), v);
  return *std::min_element(buf, buf + kW32);
}
inline std::int32_t hmax32(__m256i v) {
  alignas(32) std::int32_t buf[kW32];
  _mm256_store_si256(reinterpret_cast<__m256i*>(buf), v);
  return *std::max_element(buf, buf + kW32);
}
inline std::int64_t hsum64(__m256i v) {
  alignas(32) std::int64_t buf[kW64];
  _mm256_store_si256(reinterpret_cast<__m256i*>(buf), v);
  return buf[0] + buf[1] + buf[2] + buf[3];
}

TraceStats trace_stats(const std::int32_t* s, std::size_t n) {
  if (n < kW32 + 1) return scalar::trace_stats(s, n);
  __m256i vmin = load32(s);
  __m256i vmax = vmin;
  __m256i vsum = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + kW32 <= n; i += kW32) {
    const __m256i v = load32(s + i);
    vmin = _mm256_min_epi32(vmin, v);
    vmax = _mm256_max_epi32(vmax, v);
    vsum = _mm256_add_epi64(vsum, _mm256_cvtepi32_epi64(_mm256_castsi256_si128(v)));
    vsum = _mm256_add_epi64(vsum, _mm256_cvtepi32_epi64(_mm256_extracti128_si256(v, 1)));
  }
  TraceStats st;
  st.min = hmin32(vmin);
  st.max = hmax32(vmax);
  st.sum = hsum64(vsum);
  for (; i < n; ++i) {
    st.min = std::min(st.min, s[i]);
    st.max = std::max(st.max, s[i]);
    st.sum += s[i];
  }

  // Consecutive differences d[k] = s[k+1] - s[k] for k in [0, n-1).
  const std::size_t m = n - 1;
  __m256i vinc = _mm256_sub_epi32(load32(s + 1), load32(s));
  __m256i vdec = _mm256_sub_epi32(load32(s), load32(s + 1));
  std::size_t k = kW32;
  for (; k + kW32 <= m; k += kW32) {
    const __m256i d = _mm256_sub_epi32(load32(s + k + 1), load32(s + k));
    vinc = _mm256_max_epi32(vinc, d);
    vdec = _mm256_max_epi32(vdec, _mm256_sub_epi32(_mm256_setzero_si256(), d));
  }
  st.max_increase = hmax32(vinc);
  st.max_decrease = hmax32(vdec);
  for (; k < m; ++k) {
    const std::int32_t d = s[k + 1] - s[k];
    st.max_increase = std::max(st.max_increase, d);
    st.max_decrease = std::max(st.max_decrease, -d);
  }
  return st;
}

std::int64_t squared_distance(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + kW32 <= n; i += kW32) {
    const __m256i d = _mm256_sub_epi32(load32(a + i), load32(b + i));
    const __m256i odd = _mm256_srli_epi64(d, 32);
    acc = _mm256_add_epi64(acc, _mm256_mul_epi32(d, d));
    acc = _mm256_add_epi64(acc, _mm256_mul_epi32(odd, odd));
  }
  return hsum64(acc) + scalar::squared_distance(a + i, b + i, n - i);
}

void de_mutate(const double* base, const double* plus, const double* minus, double f,
               double* out, std::size_t n) {
  const __m256d vf = _mm256_set1_pd(f);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kW64 <= n; i += kW64) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(plus + i), _mm256_loadu_pd(minus + i));
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(base + i), _mm256_mul_pd(vf, diff));
    // Operand order mirrors the scalar clamp, including for -0.0.
    _mm256_storeu_pd(out + i, _mm256_max_pd(zero, _mm256_min_pd(v, one)));
  }
  scalar::de_mutate(base + i, plus + i, minus + i, f, out + i, n - i);
}

constexpr LaneKernels kAvx2{
    "avx2", arith, unary, compare, logic, logic_not, mux, convert,
    trace_stats, squared_distance, de_mutate,
};

}  // namespace

const LaneKernels& avx2_kernel_table() { return kAvx2; }

}  // namespace isbst::simd
