#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; SIMD variants are selected at runtime and must agree with
// the scalar version bit for bit (the dot product fixes a 4-lane summation
// order, and nothing is fused into FMA).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace tdclt::kernels {

enum class Isa { scalar, avx2, neon };

struct Table {
  Isa isa;
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  std::size_t (*count_leq)(const double* v, std::size_t n, double threshold);
  // bits[w] bit b is set iff v[64w + b] <= threshold; unused tail bits clear.
  void (*pack_leq)(const double* v, std::size_t n, double threshold,
                   std::uint64_t* bits);
  std::size_t (*popcount_xor)(const std::uint64_t* a, const std::uint64_t* b,
                              std::size_t words);
  std::size_t (*popcount_and)(const std::uint64_t* a, const std::uint64_t* b,
                              std::size_t words);
  double (*max_abs)(const double* v, std::size_t n);
};

const Table& scalar_table();
// nullptr when the variant is not compiled in or the CPU lacks it.
const Table* avx2_table();
const Table* neon_table();

//! The table used by the library. Chosen once: the best supported ISA,
//! unless TDCLT_SIMD=scalar|avx2|neon overrides it.
const Table& active();

inline std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline std::size_t count_leq(std::span<const double> v, double threshold) {
  return active().count_leq(v.data(), v.size(), threshold);
}

inline void pack_leq(std::span<const double> v, double threshold,
                     std::span<std::uint64_t> bits) {
  active().pack_leq(v.data(), v.size(), threshold, bits.data());
}

inline std::size_t popcount_xor(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b) {
  return active().popcount_xor(a.data(), b.data(), a.size());
}

inline std::size_t popcount_and(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b) {
  return active().popcount_and(a.data(), b.data(), a.size());
}

inline double max_abs(std::span<const double> v) {
  return active().max_abs(v.data(), v.size());
}

//! out = matrix * x for a row-major rows x cols matrix.
void matvec(std::span<const double> matrix, std::size_t rows,
            std::size_t cols, std::span<const double> x,
            std::span<double> out);

}  // namespace tdclt::kernels
