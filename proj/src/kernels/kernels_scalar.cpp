#include <bit>

#include "tdclt/kernels.hpp"

namespace tdclt::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) lane[l] += a[i + l] * b[i + l];
  }
  double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

std::size_t count_leq_scalar(const double* v, std::size_t n, double thr) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += v[i] <= thr ? 1 : 0;
  return count;
}

void pack_leq_scalar(const double* v, std::size_t n, double thr,
                     std::uint64_t* bits) {
  const std::size_t words = words_for(n);
  for (std::size_t w = 0; w < words; ++w) {
    std::uint64_t word = 0;
    const std::size_t base = w * 64;
    const std::size_t end = n - base < 64 ? n - base : 64;
    for (std::size_t b = 0; b < end; ++b) {
      if (v[base + b] <= thr) word |= std::uint64_t{1} << b;
    }
    bits[w] = word;
  }
}

std::size_t popcount_xor_scalar(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t words) {
  std::size_t count = 0;
  for (std::size_t w = 0; w < words; ++w) count += std::popcount(a[w] ^ b[w]);
  return count;
}

std::size_t popcount_and_scalar(const std::uint64_t* a, const std::uint64_t* b,
                                std::size_t words) {
  std::size_t count = 0;
  for (std::size_t w = 0; w < words; ++w) count += std::popcount(a[w] & b[w]);
  return count;
}

double max_abs_scalar(const double* v, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = v[i] < 0 ? -v[i] : v[i];
    if (a > m) m = a;
  }
  return m;
}

}  // namespace

const Table& scalar_table() {
  static const Table table{Isa::scalar,         "scalar",
                           dot_scalar,          count_leq_scalar,
                           pack_leq_scalar,     popcount_xor_scalar,
                           popcount_and_scalar, max_abs_scalar};
  return table;
}

}  // namespace tdclt::kernels
