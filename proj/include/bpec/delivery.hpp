#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpec/channel.hpp"
#include "bpec/gf256.hpp"
#include "bpec/params.hpp"
#include "bpec/placement.hpp"
#include "bpec/rng.hpp"

namespace bpec {

// Identity of a payload. Ids below the base count name source packets
// (file * F + index, or synthetic seeds); higher ids name the coded payload
// of transcript slot (id - base_count). Clone tokens created from one slot
// share its symbol.
using SymbolId = std::uint32_t;

enum class TokenOrigin : std::uint8_t { cache_seed, phase1_upgrade, subphase_upgrade, synthetic_seed };
enum class TokenEnd : std::uint8_t { pending, direct, upgraded };

// One unit of pending work: a payload wanted by one user and held verbatim or
// cancellable by known_by. Lives in the pool for {wanted_by} | known_by.
struct TokenRecord {
  SymbolId symbol = 0;
  std::uint8_t wanted_by = 0;
  UserSet known_by = 0;
  UserSet pool = 0;
  TokenOrigin origin = TokenOrigin::cache_seed;
  TokenEnd end = TokenEnd::pending;
  std::int64_t created_slot = -1;
  std::int64_t consumed_slot = -1;
};

struct SlotRecord {
  UserSet subphase = 0;
  UserSet state = 0;
  SymbolId symbol = 0;  // identity of the transmitted payload
  // Transmitted combination, merged per symbol (heads carrying the same
  // symbol appear once, with their coefficients summed).
  std::vector<std::pair<SymbolId, std::uint8_t>> combo;
  Payload payload;
};

struct SubphaseLength {
  UserSet subphase = 0;
  std::uint64_t slots = 0;
};

struct Transcript {
  int user_count = 0;
  SymbolId base_symbols = 0;
  std::vector<SlotRecord> slots;
  std::vector<SubphaseLength> subphase_lengths;  // execution order

  std::uint64_t total_slots() const { return slots.size(); }
};

struct TokenCounters {
  std::uint64_t cache_seeded = 0;
  std::uint64_t phase1_packets = 0;
  std::uint64_t phase1_direct = 0;
  std::uint64_t phase1_upgraded = 0;
  std::uint64_t pool_direct = 0;
  std::uint64_t pool_upgraded = 0;
  std::uint64_t upgrade_created = 0;
  std::uint64_t pending_left = 0;
};

struct DeliveryResult {
  Transcript transcript;
  std::vector<TokenRecord> tokens;
  TokenCounters counters;
};

// One line per slot: slot_index,subphase_bitmask,state_bitmask.
std::string transcript_log(const Transcript& transcript);

// Feedback-driven delivery engine. Pending tokens sit in per-pool FIFO
// queues; a coded slot combines the head of every nonempty queue of the
// current pool with fresh random nonzero coefficients. Feedback then either
// credits a head to its user (the user or an outsider received) or leaves it
// in place; outsider receptions re-enqueue the slot as a higher-order token.
class DeliveryEngine {
 public:
  // base_payloads must outlive the engine and hold base_count payloads.
  DeliveryEngine(int user_count, const std::vector<Payload>* base_payloads, SymbolId base_count,
                 Rng coding_rng);

  void seed_token(SymbolId symbol, int wanted_by, UserSet known_by, TokenOrigin origin);
  void seed_phase1_packet(int user, SymbolId symbol);

  // Subphase {user}: each pending packet is repeated until someone receives
  // it; a miss at the target with receivers B re-enqueues it in pool
  // {user} | B.
  void run_phase1_user(int user, BroadcastChannel& channel);
  void run_phase1(BroadcastChannel& channel);

  // Coded subphase for one pool of order >= 2.
  void run_subphase(UserSet pool, BroadcastChannel& channel);

  // All subphases of orders from_order..K, lexicographic within each order.
  void run_phases(int from_order, BroadcastChannel& channel);

  std::uint64_t queue_size(UserSet pool, int user) const;
  const Payload& payload_of(SymbolId symbol) const;

  // Moves out transcript and token registry; counts leftovers.
  DeliveryResult finish();

 private:
  struct Queue {
    std::vector<std::uint32_t> token_ids;
    std::size_t head = 0;
    bool empty() const { return head >= token_ids.size(); }
  };
  struct Pool {
    std::vector<Queue> queues;  // indexed by user
  };

  Pool& pool_at(UserSet mask);
  void enqueue(std::uint32_t token_id);

  int user_count_;
  const std::vector<Payload>* base_payloads_;
  SymbolId base_count_;
  Rng rng_;
  std::vector<TokenRecord> tokens_;
  std::vector<Pool> pools_;  // sized 1 << K, queues allocated lazily
  std::vector<std::vector<SymbolId>> phase1_;  // per user, pending uncoded packets
  Transcript transcript_;
  TokenCounters counters_;
};

// Turns the cache state into pending work: packets of demands[k] cached by
// nobody become user k's phase-1 uncoded list, packets cached by a subset not
// containing k become tokens in pool {k} | subset, and packets the requester
// already caches are dropped. Throws std::invalid_argument on duplicate
// demands.
void seed_pools(DeliveryEngine& engine, const SubfileMap& subfiles,
                const std::vector<int>& demands);

// Full delivery for distinct demands (demands[k] = file index requested by
// user k).
DeliveryResult run_delivery(const Library& library, const SubfileMap& subfiles,
                            const std::vector<int>& demands, const SystemParams& params,
                            BroadcastChannel& channel, Rng coding_rng);

// Delivery started directly at order start_order, with tokens_per_subset
// fresh random packets pending per user of every subset of that size.
// measured_rate = C(K, start_order) * tokens_per_subset / total slots.
struct SeededRun {
  DeliveryResult result;
  std::uint64_t total_slots = 0;
  double measured_rate = 0.0;
};
SeededRun run_seeded_phases(int user_count, int start_order, int tokens_per_subset,
                            int payload_bytes, BroadcastChannel& channel, Rng coding_rng);

struct DecodeResult {
  bool success = false;
  std::uint64_t unresolved = 0;  // wanted packets left unknown on failure
  std::vector<Payload> file;     // all F packets on success
};

// Reconstructs user's requested file from its receptions (read off the
// transcript and state history), its cache contents, and the slot coefficient
// headers. Staged per-subphase elimination in reverse transmission order with
// a joint cleanup pass; failure means rank deficiency, never a wrong payload.
DecodeResult decode_user(int user, const DeliveryResult& run, const Library& library,
                         const SubfileMap& subfiles, const std::vector<int>& demands);

struct NoFeedbackMessage {
  UserSet audience = 0;
  std::uint64_t length = 0;  // packets in the multicast message
  std::uint64_t slots = 0;
};

struct NoFeedbackResult {
  std::uint64_t total_slots = 0;
  std::vector<NoFeedbackMessage> messages;
  bool decode_checked = false;
  std::vector<char> decode_success;  // per user, meaningful when checked
};

// Non-adaptive baseline: one multicast message per user subset (the XOR of
// the subfiles its members miss), each streamed as random linear combinations
// until every member has as many receptions as the message has packets. The
// completion check observes the channel but the encoder never adapts.
// verify_decode additionally solves each message system per user and checks
// the reconstructed file bit-exactly.
NoFeedbackResult run_delivery_no_feedback(const Library& library, const SubfileMap& subfiles,
                                          const std::vector<int>& demands,
                                          const SystemParams& params, BroadcastChannel& channel,
                                          Rng coding_rng, bool verify_decode);

struct ConservationReport {
  bool ok = true;
  std::string detail;
};

// Token accounting: every token is consumed exactly once, upgrades pair with
// created tokens, pool invariants hold, and order-K tokens never upgrade.
ConservationReport audit_conservation(const DeliveryResult& run, int user_count);

}  // namespace bpec
