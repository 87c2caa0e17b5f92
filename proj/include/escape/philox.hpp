#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is
// a pure function of (seed, stream, index), so simulations are reproducible
// independent of scheduling.

#include <array>
#include <cstdint>

namespace escape {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Block generate(Block ctr, Key key) {
    ctr = round(ctr, key);
    for (int r = 1; r < 10; ++r) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

  static constexpr Block round(const Block& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
};

/// Separates the random streams consumed by different parts of the library
/// so that the same (seed, stream) never feeds two consumers.
enum class RngDomain : std::uint16_t {
  walk = 1,
  martingale = 2,
  eigen_start = 3,
  vertex_sample = 4,
};

/// Counter layout: word 0-1 carry the 48-bit draw index and the domain tag,
/// words 2-3 the 64-bit stream (typically the trajectory index).
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream, RngDomain domain)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)),
        domain_(static_cast<std::uint32_t>(domain) << 16) {}

  constexpr Philox4x32::Block block(std::uint64_t index) const {
    return Philox4x32::generate(
        {static_cast<std::uint32_t>(index),
         static_cast<std::uint32_t>((index >> 32) & 0xFFFF) | domain_, stream_lo_, stream_hi_},
        key_);
  }

  constexpr std::uint64_t bits(std::uint64_t index) const {
    const auto b = block(index);
    return static_cast<std::uint64_t>(b[0]) | (static_cast<std::uint64_t>(b[1]) << 32);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  /// Uniform on {0, ..., bound-1} by 64x32 multiply-shift.
  constexpr std::uint32_t below(std::uint64_t index, std::uint32_t bound) const {
    const unsigned __int128 wide = static_cast<unsigned __int128>(bits(index)) * bound;
    return static_cast<std::uint32_t>(wide >> 64);
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint32_t domain_;
};

}  // namespace escape
