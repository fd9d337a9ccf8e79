#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace spikemf {

// Philox 4x64-10: a pure function from (key, counter) to four 64-bit words.
// Keying scheme used throughout: key = (seed, unit) where unit is a network
// or trial index, counter = (block, stream, 0, 0).  Distinct (seed, unit,
// stream) triples address disjoint streams, and any block of a stream can be
// produced without sequencing, which keeps parallel fills deterministic.
struct Philox4x64 {
  using Block = std::array<std::uint64_t, 4>;

  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

  static Block generate(std::uint64_t k0, std::uint64_t k1, Block ctr) {
    for (int round = 0; round < 10; ++round) {
      const auto p0 = static_cast<unsigned __int128>(kMul0) * ctr[0];
      const auto p1 = static_cast<unsigned __int128>(kMul1) * ctr[2];
      ctr = {static_cast<std::uint64_t>(p1 >> 64) ^ ctr[1] ^ k0,
             static_cast<std::uint64_t>(p1),
             static_cast<std::uint64_t>(p0 >> 64) ^ ctr[3] ^ k1,
             static_cast<std::uint64_t>(p0)};
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    return ctr;
  }
};

// Stream ids; a stream never serves two purposes.
enum : std::uint64_t {
  kStreamWeights = 0,
  kStreamSparsityMask = 1,
  kStreamStimulus = 2,
  kStreamTrials = 3,
};

inline double to_unit_interval(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1.0p-53;  // [0, 1)
}

// Four standard gaussians from one Philox block (two Box-Muller pairs).
// Addressable: block b always yields draws 4b .. 4b+3 of the stream.
inline void gaussian_block(std::uint64_t seed, std::uint64_t unit,
                           std::uint64_t stream, std::uint64_t block,
                           double out[4]) {
  constexpr double kTwoPi = 6.28318530717958647693;
  const auto w = Philox4x64::generate(seed, unit, {block, stream, 0, 0});
  const double u1 = 1.0 - to_unit_interval(w[0]);  // (0, 1]
  const double a1 = kTwoPi * to_unit_interval(w[1]);
  const double u2 = 1.0 - to_unit_interval(w[2]);
  const double a2 = kTwoPi * to_unit_interval(w[3]);
  const double r1 = std::sqrt(-2.0 * std::log(u1));
  const double r2 = std::sqrt(-2.0 * std::log(u2));
  out[0] = r1 * std::cos(a1);
  out[1] = r1 * std::sin(a1);
  out[2] = r2 * std::cos(a2);
  out[3] = r2 * std::sin(a2);
}

// Sequential view of one (seed, unit, stream) stream.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t unit, std::uint64_t stream)
      : seed_(seed), unit_(unit), stream_(stream) {}

  std::uint64_t next_u64() {
    if (lane_ == 4) {
      block_ = Philox4x64::generate(seed_, unit_, {next_block_++, stream_, 0, 0});
      lane_ = 0;
    }
    return block_[lane_++];
  }

  double next_uniform() { return to_unit_interval(next_u64()); }

  double next_gaussian() {
    constexpr double kTwoPi = 6.28318530717958647693;
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_uniform();
    const double angle = kTwoPi * next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  // Uniform integer in [0, bound); bound must be > 0.  The modulo bias is
  // below 2^-40 for every bound used here (bound <= 2^20).
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  std::uint64_t seed_, unit_, stream_;
  std::uint64_t next_block_ = 0;
  Philox4x64::Block block_{};
  int lane_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spikemf
