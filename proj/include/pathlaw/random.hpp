#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include <boost/math/special_functions/erf.hpp>

namespace pathlaw {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

inline constexpr const char *kRngName = "philox4x32-10";
inline constexpr const char *kNormalMethod = "inverse-cdf";

// Sub-streams of one path: independent draws for distinct purposes.
enum class Substream : std::uint32_t { increments = 0, bridge = 1, knots = 2 };

// Sequential draws for one (seed, stream) pair. The counter encodes the
// stream index and a block number, so stream i never depends on how many
// draws another stream made: paths can be generated in any order or thread.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream, Substream sub = Substream::increments)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_((static_cast<std::uint32_t>(stream >> 32) & 0x00FFFFFFu) |
                   (static_cast<std::uint32_t>(sub) << 24)) {}

  std::uint32_t next_u32() {
    if (used_ == 4) {
      buffer_ = philox4x32_10({static_cast<std::uint32_t>(block_),
                               static_cast<std::uint32_t>(block_ >> 32), stream_lo_, stream_hi_},
                              key_);
      ++block_;
      used_ = 0;
    }
    return buffer_[used_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return -M_SQRT2 * boost::math::erfc_inv(2.0 * uniform()); }

 private:
  PhiloxKey key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int used_ = 4;
};

}  // namespace pathlaw
