// AArch64 variant. Two float64x2 accumulators reproduce the scalar 4-lane
// order; vmulq + vaddq (never vfmaq) keeps rounding identical.

#include <arm_neon.h>

#include <bit>

#include "tdclt/kernels.hpp"

namespace tdclt::kernels {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc01 = vdupq_n_f64(0.0);
  float64x2_t acc23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc23 = vaddq_f64(acc23,
                      vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double sum = (vgetq_lane_f64(acc01, 0) + vgetq_lane_f64(acc01, 1)) +
               (vgetq_lane_f64(acc23, 0) + vgetq_lane_f64(acc23, 1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

std::size_t count_leq_neon(const double* v, std::size_t n, double thr) {
  const float64x2_t t = vdupq_n_f64(thr);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // Comparison lanes are all-ones (== -1) when true.
    acc = vsubq_u64(acc, vcleq_f64(vld1q_f64(v + i), t));
  }
  std::size_t count = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < n; ++i) count += v[i] <= thr ? 1 : 0;
  return count;
}

void pack_leq_neon(const double* v, std::size_t n, double thr,
                   std::uint64_t* bits) {
  const float64x2_t t = vdupq_n_f64(thr);
  const std::size_t full = n / 64;
  for (std::size_t w = 0; w < full; ++w) {
    const double* p = v + w * 64;
    std::uint64_t word = 0;
    for (int g = 0; g < 32; ++g) {
      const uint64x2_t m = vcleq_f64(vld1q_f64(p + 2 * g), t);
      word |= (vgetq_lane_u64(m, 0) & 1u) << (2 * g);
      word |= (vgetq_lane_u64(m, 1) & 1u) << (2 * g + 1);
    }
    bits[w] = word;
  }
  if (full * 64 < n) {
    std::uint64_t word = 0;
    for (std::size_t b = 0; full * 64 + b < n; ++b) {
      if (v[full * 64 + b] <= thr) word |= std::uint64_t{1} << b;
    }
    bits[full] = word;
  }
}

template <bool Xor>
std::size_t popcount_pair_neon(const std::uint64_t* a, const std::uint64_t* b,
                               std::size_t words) {
  std::size_t count = 0;
  std::size_t w = 0;
  for (; w + 2 <= words; w += 2) {
    const uint64x2_t va = vld1q_u64(a + w);
    const uint64x2_t vb = vld1q_u64(b + w);
    const uint64x2_t v = Xor ? veorq_u64(va, vb) : vandq_u64(va, vb);
    count += vaddvq_u8(vcntq_u8(vreinterpretq_u8_u64(v)));
  }
  for (; w < words; ++w) count += std::popcount(Xor ? a[w] ^ b[w] : a[w] & b[w]);
  return count;
}

std::size_t popcount_xor_neon(const std::uint64_t* a, const std::uint64_t* b,
                              std::size_t words) {
  return popcount_pair_neon<true>(a, b, words);
}

std::size_t popcount_and_neon(const std::uint64_t* a, const std::uint64_t* b,
                              std::size_t words) {
  return popcount_pair_neon<false>(a, b, words);
}

double max_abs_neon(const double* v, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(v + i)));
  double best = vgetq_lane_f64(m, 0) > vgetq_lane_f64(m, 1)
                    ? vgetq_lane_f64(m, 0)
                    : vgetq_lane_f64(m, 1);
  for (; i < n; ++i) {
    const double a = v[i] < 0 ? -v[i] : v[i];
    if (a > best) best = a;
  }
  return best;
}

}  // namespace

const Table* neon_table() {
  static const Table table{Isa::neon,        "neon",
                           dot_neon,         count_leq_neon,
                           pack_leq_neon,    popcount_xor_neon,
                           popcount_and_neon, max_abs_neon};
  return &table;
}

}  // namespace tdclt::kernels
