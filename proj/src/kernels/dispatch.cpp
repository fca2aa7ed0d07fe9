#include <cstdlib>
#include <stdexcept>
#include <string>

#include "tdclt/kernels.hpp"

namespace tdclt::kernels {

#if !defined(TDCLT_HAVE_AVX2)
const Table* avx2_table() { return nullptr; }
#endif
#if !defined(TDCLT_HAVE_NEON)
const Table* neon_table() { return nullptr; }
#endif

namespace {

const Table& select() {
  const char* env = std::getenv("TDCLT_SIMD");
  const std::string wanted = env ? env : "auto";
  if (wanted == "scalar") return scalar_table();
  if (wanted == "avx2" || wanted == "neon") {
    const Table* t = wanted == "avx2" ? avx2_table() : neon_table();
    if (!t) throw std::runtime_error("TDCLT_SIMD=" + wanted + " not supported");
    return *t;
  }
  if (const Table* t = avx2_table()) return *t;
  if (const Table* t = neon_table()) return *t;
  return scalar_table();
}

}  // namespace

const Table& active() {
  static const Table& table = select();
  return table;
}

void matvec(std::span<const double> matrix, std::size_t rows,
            std::size_t cols, std::span<const double> x,
            std::span<double> out) {
  const Table& t = active();
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = t.dot(matrix.data() + r * cols, x.data(), cols);
  }
}

}  // namespace tdclt::kernels
