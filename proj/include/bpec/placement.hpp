#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpec/gf256.hpp"
#include "bpec/params.hpp"
#include "bpec/rng.hpp"

namespace bpec {

// The server's N files of F packets each.
struct Library {
  int file_count = 0;
  int packets_per_file = 0;
  std::vector<Payload> packets;  // file * F + index

  const Payload& at(int file, int index) const {
    return packets[static_cast<std::size_t>(file) * packets_per_file + index];
  }
};

// Packet indices each user stores, per file. Every (user, file) pair holds
// exactly quota indices.
struct CacheTable {
  int user_count = 0;
  int file_count = 0;
  int packets_per_file = 0;
  int quota = 0;
  // user * N + file -> sorted packet indices
  std::vector<std::vector<std::uint32_t>> cached;

  const std::vector<std::uint32_t>& indices(int user, int file) const {
    return cached[static_cast<std::size_t>(user) * file_count + file];
  }
};

// Partition of each file's packets by the exact set of users caching them.
struct SubfileMap {
  int user_count = 0;
  int file_count = 0;
  int packets_per_file = 0;
  // file * F + index -> bitmask of caching users
  std::vector<UserSet> mask;
  // file -> subset bitmask -> packet indices (ascending)
  std::vector<std::vector<std::vector<std::uint32_t>>> entries;

  UserSet packet_mask(int file, int index) const {
    return mask[static_cast<std::size_t>(file) * packets_per_file + index];
  }
  const std::vector<std::uint32_t>& entry(int file, UserSet subset) const {
    return entries[file][subset];
  }
  bool cached_by(int user, int file, int index) const {
    return contains(packet_mask(file, index), user);
  }
};

// N*F payloads of uniform random bytes, reproducible from the library stream
// of params.seed.
Library generate_library(const SystemParams& params, Rng& rng);

// Decentralized placement: for every (user, file) pair, quota packet indices
// drawn uniformly without replacement, independently across pairs.
CacheTable place_decentralized(const SystemParams& params, Rng& rng);

SubfileMap subfile_partition(const CacheTable& cache, const SystemParams& params);

// Fraction of file i's packets cached by nobody in `users`: the empirical
// counterpart of the residual entropy of the file given those caches, which
// tends to (1-p)^|users| for large F.
double uncached_fraction(const SubfileMap& subfiles, int file, UserSet users);

// CSV dump: file_id, subset_bitmask, count.
std::string subfile_stats_csv(const SubfileMap& subfiles);

}  // namespace bpec
