#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace tdclt {

//! Philox4x64-10 block function. Pure: the output depends only on
//! (counter, key).
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter ctr, Key key);
};

//! Identifies one independent replicate stream under a master seed.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate = 0;
};

//! Disjoint substreams of a replicate. Labels never collide, so e.g. the
//! auxiliary uniforms of the distributional transform are independent of
//! the path draws of the same replicate.
enum class Substream : std::uint16_t {
  path = 1,
  aux = 2,
  branch = 3,
  limit = 4,
  pilot = 5,
  sample = 6,
};

/*!
 * Sequential view of a counter-based stream.
 *
 * The counter layout is (replicate, label << 48 | block, slot, 0) under the
 * master seed as key, so any (seed, replicate, label) maps to a fixed bit
 * sequence independent of execution order.
 */
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(SeedSpec seed, Substream label, std::uint64_t slot = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  //! Uniform on [0, 1) with 53 random bits.
  double uniform();
  //! Uniform on (0, 1].
  double uniform_open0();
  double normal();

 private:
  void refill();

  Philox4x64::Key key_;
  std::uint64_t replicate_;
  std::uint64_t label_;
  std::uint64_t slot_;
  std::uint64_t block_ = 0;
  Philox4x64::Counter buf_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

//! Stateless access to a single 64-bit word of a stream: word `index` of
//! (seed, label, slot). Used where draws are needed out of order.
std::uint64_t random_word(SeedSpec seed, Substream label, std::uint64_t slot,
                          std::uint64_t index);

inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace tdclt
