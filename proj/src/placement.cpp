#include "bpec/placement.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bpec {

void SystemParams::validate() const {
  if (user_count < 2 || user_count > kMaxUsers)
    throw std::invalid_argument("params: user_count must be in [2, 16]");
  if (file_count < 1) throw std::invalid_argument("params: file_count must be >= 1");
  if (memory < 0.0 || memory > file_count)
    throw std::invalid_argument("params: memory must be in [0, N]");
  if (packets_per_file < 1) throw std::invalid_argument("params: packets_per_file must be >= 1");
  if (erasure_prob < 0.0 || erasure_prob >= 1.0)
    throw std::invalid_argument("params: erasure_prob must be in [0, 1)");
  if (payload_bytes < 1) throw std::invalid_argument("params: payload_bytes must be >= 1");
}

Library generate_library(const SystemParams& params, Rng& rng) {
  params.validate();
  Library lib;
  lib.file_count = params.file_count;
  lib.packets_per_file = params.packets_per_file;
  lib.packets.resize(static_cast<std::size_t>(params.file_count) * params.packets_per_file);
  for (auto& p : lib.packets) {
    p.resize(params.payload_bytes);
    for (auto& b : p) b = rng.byte();
  }
  return lib;
}

CacheTable place_decentralized(const SystemParams& params, Rng& rng) {
  params.validate();
  CacheTable table;
  table.user_count = params.user_count;
  table.file_count = params.file_count;
  table.packets_per_file = params.packets_per_file;
  table.quota = params.cache_quota();
  table.cached.resize(static_cast<std::size_t>(params.user_count) * params.file_count);

  const int F = params.packets_per_file;
  std::vector<std::uint32_t> perm(F);
  for (auto& slot : table.cached) {
    // Partial Fisher-Yates: the first quota entries are a uniform subset.
    std::iota(perm.begin(), perm.end(), 0u);
    for (int i = 0; i < table.quota; ++i) {
      const auto j = i + static_cast<int>(rng.below(F - i));
      std::swap(perm[i], perm[j]);
    }
    slot.assign(perm.begin(), perm.begin() + table.quota);
    std::sort(slot.begin(), slot.end());
  }
  return table;
}

SubfileMap subfile_partition(const CacheTable& cache, const SystemParams& params) {
  SubfileMap map;
  map.user_count = cache.user_count;
  map.file_count = cache.file_count;
  map.packets_per_file = cache.packets_per_file;
  map.mask.assign(static_cast<std::size_t>(cache.file_count) * cache.packets_per_file, 0);

  for (int user = 0; user < cache.user_count; ++user)
    for (int file = 0; file < cache.file_count; ++file)
      for (auto idx : cache.indices(user, file))
        map.mask[static_cast<std::size_t>(file) * cache.packets_per_file + idx] |= 1u << user;

  const std::size_t subsets = 1ull << cache.user_count;
  map.entries.resize(cache.file_count);
  for (int file = 0; file < cache.file_count; ++file) {
    map.entries[file].resize(subsets);
    for (int idx = 0; idx < cache.packets_per_file; ++idx)
      map.entries[file][map.packet_mask(file, idx)].push_back(idx);
  }
  (void)params;
  return map;
}

double uncached_fraction(const SubfileMap& subfiles, int file, UserSet users) {
  std::uint64_t uncovered = 0;
  const auto& per_file = subfiles.entries[file];
  for (UserSet subset = 0; subset < per_file.size(); ++subset)
    if ((subset & users) == 0) uncovered += per_file[subset].size();
  return static_cast<double>(uncovered) / subfiles.packets_per_file;
}

std::string subfile_stats_csv(const SubfileMap& subfiles) {
  std::string out = "file_id,subset_bitmask,count\n";
  for (int file = 0; file < subfiles.file_count; ++file)
    for (UserSet subset = 0; subset < subfiles.entries[file].size(); ++subset) {
      const auto count = subfiles.entries[file][subset].size();
      if (count == 0) continue;
      out += std::to_string(file);
      out += ',';
      out += std::to_string(subset);
      out += ',';
      out += std::to_string(count);
      out += '\n';
    }
  return out;
}

}  // namespace bpec
