#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

namespace volboot {

// Level tags mixed into the stream key. Values are part of the on-disk
// reproducibility contract: never renumber.
enum class Level : std::uint8_t {
  Path = 1,
  Replicate = 2,
  Bootstrap = 3,
  Innovation = 4,
  Volatility = 5,
  Sign = 6,
  Multiplier = 7,
  Oracle = 8,
  Discrete = 9,
  Grid = 10,
  User = 11,
};

const char* level_name(Level level);

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

/// Hierarchical seed: a master seed plus the (level, index) lineage leading to
/// one random stream.
///
/// The stream key is folded incrementally:
///   key_0     = mix64(master)
///   key_{k+1} = mix64(key_k ^ mix64((tag << 56) ^ index ^ 0xA5A5...))
/// so the key of a child depends on the whole ordered lineage. Any two distinct
/// lineages collide only if the 64-bit keys collide.
class SeedPath {
 public:
  static constexpr std::size_t kMaxDepth = 8;

  struct Entry {
    Level level;
    std::uint64_t index;
  };

  explicit SeedPath(std::uint64_t master_seed = 0);

  SeedPath child(Level level, std::uint64_t index) const;

  std::uint64_t master_seed() const { return master_; }
  std::uint64_t key() const { return key_; }
  std::size_t depth() const { return depth_; }
  const Entry& operator[](std::size_t i) const { return lineage_[i]; }

  /// e.g. "42/path:3/replicate:17"
  std::string to_string() const;

  friend bool operator==(const SeedPath& a, const SeedPath& b);

 private:
  std::uint64_t master_;
  std::uint64_t key_;
  std::array<Entry, kMaxDepth> lineage_{};
  std::size_t depth_ = 0;
};

/// xoshiro256++ (Blackman & Vigna). Satisfies UniformRandomBitGenerator, so it
/// plugs into <random> and Boost.Random distributions.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t key);
  explicit Xoshiro256pp(const SeedPath& seed) : Xoshiro256pp(seed.key()) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Advances the state by 2^128 calls.
  void jump();

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_;
};

}  // namespace volboot
