#include "volboot/rng.hpp"

#include <stdexcept>

namespace volboot {

const char* level_name(Level level) {
  switch (level) {
    case Level::Path: return "path";
    case Level::Replicate: return "replicate";
    case Level::Bootstrap: return "bootstrap";
    case Level::Innovation: return "innovation";
    case Level::Volatility: return "volatility";
    case Level::Sign: return "sign";
    case Level::Multiplier: return "multiplier";
    case Level::Oracle: return "oracle";
    case Level::Discrete: return "discrete";
    case Level::Grid: return "grid";
    case Level::User: return "user";
  }
  return "unknown";
}

SeedPath::SeedPath(std::uint64_t master_seed)
    : master_(master_seed), key_(mix64(master_seed)) {}

SeedPath SeedPath::child(Level level, std::uint64_t index) const {
  if (depth_ == kMaxDepth) {
    throw std::length_error("SeedPath: lineage deeper than kMaxDepth");
  }
  SeedPath out = *this;
  out.lineage_[depth_] = {level, index};
  out.depth_ = depth_ + 1;
  const std::uint64_t tagged =
      (static_cast<std::uint64_t>(level) << 56) ^ index ^ 0xA5A5A5A5A5A5A5A5ULL;
  out.key_ = mix64(key_ ^ mix64(tagged));
  return out;
}

std::string SeedPath::to_string() const {
  std::string s = std::to_string(master_);
  for (std::size_t i = 0; i < depth_; ++i) {
    s += '/';
    s += level_name(lineage_[i].level);
    s += ':';
    s += std::to_string(lineage_[i].index);
  }
  return s;
}

bool operator==(const SeedPath& a, const SeedPath& b) {
  if (a.master_ != b.master_ || a.depth_ != b.depth_) return false;
  for (std::size_t i = 0; i < a.depth_; ++i) {
    if (a.lineage_[i].level != b.lineage_[i].level ||
        a.lineage_[i].index != b.lineage_[i].index) {
      return false;
    }
  }
  return true;
}

Xoshiro256pp::Xoshiro256pp(std::uint64_t key) {
  std::uint64_t state = key;
  for (auto& word : s_) word = splitmix64(state);
}

void Xoshiro256pp::jump() {
  static constexpr std::uint64_t kJump[] = {
      0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
      0x39abdc4529b1661cULL};
  std::array<std::uint64_t, 4> acc{};
  for (std::uint64_t word : kJump) {
    for (int b = 0; b < 64; ++b) {
      if (word & (std::uint64_t{1} << b)) {
        for (int i = 0; i < 4; ++i) acc[i] ^= s_[i];
      }
      (*this)();
    }
  }
  s_ = acc;
}

}  // namespace volboot
