#pragma once

#include <cmath>
#include <cstdint>

namespace bpec {

// Bitmask over users 0..K-1.
using UserSet = std::uint32_t;

// The coding field has q = 256 elements; packet headers must be able to name
// any user, so q > K caps the supported user count.
inline constexpr int kMaxUsers = 16;

inline int popcount(UserSet s) { return __builtin_popcount(s); }
inline UserSet full_set(int users) { return static_cast<UserSet>((1u << users) - 1u); }
inline bool contains(UserSet s, int user) { return (s >> user) & 1u; }

struct SystemParams {
  int user_count = 2;          // K
  int file_count = 2;          // N
  double memory = 0.0;         // M, in files, 0 <= M <= N
  int packets_per_file = 100;  // F
  double erasure_prob = 0.0;   // delta in [0, 1)
  int payload_bytes = 16;      // P
  std::uint64_t seed = 1;

  double cache_fraction() const { return memory / file_count; }  // p = M/N

  // Packets of each file cached per user. M*F/N may be fractional; the quota
  // is rounded and analytics are evaluated at the effective fraction below.
  int cache_quota() const {
    return static_cast<int>(std::llround(memory * packets_per_file / file_count));
  }

  double effective_fraction() const {
    return static_cast<double>(cache_quota()) / packets_per_file;
  }

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

}  // namespace bpec
