#include "tdclt/rng.hpp"

#include <cmath>
#include <numbers>

namespace tdclt {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

constexpr std::uint64_t kBlockMask = (std::uint64_t{1} << 48) - 1;

}  // namespace

Philox4x64::Counter Philox4x64::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RandomStream::RandomStream(SeedSpec seed, Substream label, std::uint64_t slot)
    : key_{seed.master_seed, 0},
      replicate_(seed.replicate),
      label_(static_cast<std::uint64_t>(label)),
      slot_(slot) {}

void RandomStream::refill() {
  buf_ = Philox4x64::block(
      {replicate_, (label_ << 48) | (block_ & kBlockMask), slot_, 0}, key_);
  ++block_;
  pos_ = 0;
}

RandomStream::result_type RandomStream::operator()() {
  if (pos_ == 4) refill();
  return buf_[pos_++];
}

double RandomStream::uniform() { return to_unit((*this)()); }

double RandomStream::uniform_open0() {
  return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
}

// Box-Muller in pairs; consumption is fixed at two words per two normals.
double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open0();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t random_word(SeedSpec seed, Substream label, std::uint64_t slot,
                          std::uint64_t index) {
  const auto out = Philox4x64::block(
      {seed.replicate,
       (static_cast<std::uint64_t>(label) << 48) | ((index / 4) & kBlockMask),
       slot, 0},
      {seed.master_seed, 0});
  return out[index % 4];
}

}  // namespace tdclt
