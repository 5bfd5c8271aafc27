#include "npfuse/rng.hpp"

#include <bit>
#include <cmath>

namespace npfuse {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t absorb(std::uint64_t key, std::uint64_t word) {
  std::uint64_t x = key ^ (word * 0xD6E8FEB86659FD93ULL);
  return splitmix64(x);
}

}  // namespace

Rng::Rng(const RngSeed& seed) {
  std::uint64_t key = absorb(0x6A09E667F3BCC908ULL, seed.seed);
  key = absorb(key, seed.stream.sensor);
  key = absorb(key, seed.stream.trial);
  key = absorb(key, seed.stream.lane);
  for (auto& w : s_) w = splitmix64(key);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::exponential(double rate) { return -std::log1p(-uniform()) / rate; }

}  // namespace npfuse
