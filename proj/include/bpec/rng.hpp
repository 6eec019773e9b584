#pragma once

#include <cstdint>

namespace bpec {

// Deterministic 64-bit generator (xoshiro256** style seeded via splitmix64).
// Each module draws from its own named substream of the master seed so that,
// e.g., changing the coding coefficients does not perturb the channel sample
// path. All sampling helpers avoid std::uniform_*_distribution, whose output
// is implementation-defined; the byte streams here are identical on every
// platform for a given (seed, stream, replica).
class Rng {
 public:
  enum class Stream : std::uint64_t {
    library = 1,
    placement = 2,
    channel = 3,
    coding = 4,
    coding_nofb = 5,
  };

  Rng(std::uint64_t master_seed, Stream stream, std::uint64_t replica = 0) {
    std::uint64_t x = master_seed;
    x += 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(stream) + 1);
    x = splitmix(x);
    x += 0xbf58476d1ce4e5b9ull * (replica + 1);
    x = splitmix(x);
    for (auto& s : state_) {
      x += 0x9e3779b97f4a7c15ull;
      s = splitmix(x);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, n). Modulo bias is < n/2^64, irrelevant at simulation scale.
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  std::uint8_t byte() { return static_cast<std::uint8_t>(next() & 0xff); }

  // Uniform nonzero GF(256) coefficient.
  std::uint8_t nonzero_byte() { return static_cast<std::uint8_t>(1 + below(255)); }

  // True with probability p, exact up to one ulp of the threshold.
  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return static_cast<double>(next()) < p * 18446744073709551616.0;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  std::uint64_t state_[4];
};

}  // namespace bpec
