// Compiled with -mavx2 only (no -mfma): products and sums round exactly as
// in the scalar reference.

#include <immintrin.h>

#include <bit>

#include "tdclt/kernels.hpp"

namespace tdclt::kernels {

namespace {

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

std::size_t count_leq_avx2(const double* v, std::size_t n, double thr) {
  const __m256d t = _mm256_set1_pd(thr);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const int m0 = _mm256_movemask_pd(
        _mm256_cmp_pd(_mm256_loadu_pd(v + i), t, _CMP_LE_OQ));
    const int m1 = _mm256_movemask_pd(
        _mm256_cmp_pd(_mm256_loadu_pd(v + i + 4), t, _CMP_LE_OQ));
    const int m2 = _mm256_movemask_pd(
        _mm256_cmp_pd(_mm256_loadu_pd(v + i + 8), t, _CMP_LE_OQ));
    const int m3 = _mm256_movemask_pd(
        _mm256_cmp_pd(_mm256_loadu_pd(v + i + 12), t, _CMP_LE_OQ));
    count += std::popcount(static_cast<unsigned>(m0 | (m1 << 4) | (m2 << 8) |
                                                 (m3 << 12)));
  }
  for (; i + 4 <= n; i += 4) {
    count += std::popcount(static_cast<unsigned>(_mm256_movemask_pd(
        _mm256_cmp_pd(_mm256_loadu_pd(v + i), t, _CMP_LE_OQ))));
  }
  for (; i < n; ++i) count += v[i] <= thr ? 1 : 0;
  return count;
}

void pack_leq_avx2(const double* v, std::size_t n, double thr,
                   std::uint64_t* bits) {
  const __m256d t = _mm256_set1_pd(thr);
  const std::size_t full = n / 64;
  for (std::size_t w = 0; w < full; ++w) {
    const double* p = v + w * 64;
    std::uint64_t word = 0;
    for (int g = 0; g < 16; ++g) {
      const auto m = static_cast<std::uint64_t>(_mm256_movemask_pd(
          _mm256_cmp_pd(_mm256_loadu_pd(p + 4 * g), t, _CMP_LE_OQ)));
      word |= m << (4 * g);
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

// Nibble-table popcount (Mula) summed with vpsadbw.
inline __m256i popcount_bytes(__m256i v) {
  const __m256i lookup =
      _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4, 0, 1, 1,
                       2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo),
                         _mm256_shuffle_epi8(lookup, hi));
}

inline std::size_t horizontal_sum(__m256i acc) {
  alignas(32) std::uint64_t lane[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lane), acc);
  return static_cast<std::size_t>(lane[0] + lane[1] + lane[2] + lane[3]);
}

template <bool Xor>
std::size_t popcount_pair_avx2(const std::uint64_t* a, const std::uint64_t* b,
                               std::size_t words) {
  __m256i acc = _mm256_setzero_si256();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t w = 0;
  for (; w + 4 <= words; w += 4) {
    const __m256i va =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + w));
    const __m256i vb =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + w));
    const __m256i v = Xor ? _mm256_xor_si256(va, vb) : _mm256_and_si256(va, vb);
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(popcount_bytes(v), zero));
  }
  std::size_t count = horizontal_sum(acc);
  for (; w < words; ++w) count += std::popcount(Xor ? a[w] ^ b[w] : a[w] & b[w]);
  return count;
}

std::size_t popcount_xor_avx2(const std::uint64_t* a, const std::uint64_t* b,
                              std::size_t words) {
  return popcount_pair_avx2<true>(a, b, words);
}

std::size_t popcount_and_avx2(const std::uint64_t* a, const std::uint64_t* b,
                              std::size_t words) {
  return popcount_pair_avx2<false>(a, b, words);
}

double max_abs_avx2(const double* v, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(v + i)));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, m);
  double best = lane[0];
  for (int l = 1; l < 4; ++l) best = lane[l] > best ? lane[l] : best;
  for (; i < n; ++i) {
    const double a = v[i] < 0 ? -v[i] : v[i];
    if (a > best) best = a;
  }
  return best;
}

}  // namespace

const Table* avx2_table() {
  static const Table table{Isa::avx2,        "avx2",
                           dot_avx2,         count_leq_avx2,
                           pack_leq_avx2,    popcount_xor_avx2,
                           popcount_and_avx2, max_abs_avx2};
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
  }();
  return supported ? &table : nullptr;
}

}  // namespace tdclt::kernels
