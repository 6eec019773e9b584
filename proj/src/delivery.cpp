#include "bpec/delivery.hpp"

#include <algorithm>
#include <stdexcept>

namespace bpec {

std::string transcript_log(const Transcript& transcript) {
  std::string out = "slot_index,subphase_bitmask,state_bitmask\n";
  for (std::size_t i = 0; i < transcript.slots.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(transcript.slots[i].subphase);
    out += ',';
    out += std::to_string(transcript.slots[i].state);
    out += '\n';
  }
  return out;
}

DeliveryEngine::DeliveryEngine(int user_count, const std::vector<Payload>* base_payloads,
                               SymbolId base_count, Rng coding_rng)
    : user_count_(user_count),
      base_payloads_(base_payloads),
      base_count_(base_count),
      rng_(coding_rng),
      pools_(1ull << user_count),
      phase1_(user_count) {
  if (user_count < 2 || user_count > kMaxUsers)
    throw std::invalid_argument("delivery: bad user count");
  transcript_.user_count = user_count;
  transcript_.base_symbols = base_count;
}

DeliveryEngine::Pool& DeliveryEngine::pool_at(UserSet mask) {
  Pool& pool = pools_[mask];
  if (pool.queues.empty()) pool.queues.resize(user_count_);
  return pool;
}

const Payload& DeliveryEngine::payload_of(SymbolId symbol) const {
  if (symbol < base_count_) return (*base_payloads_)[symbol];
  return transcript_.slots[symbol - base_count_].payload;
}

void DeliveryEngine::seed_token(SymbolId symbol, int wanted_by, UserSet known_by,
                                TokenOrigin origin) {
  TokenRecord token;
  token.symbol = symbol;
  token.wanted_by = static_cast<std::uint8_t>(wanted_by);
  token.known_by = known_by;
  token.pool = known_by | (1u << wanted_by);
  token.origin = origin;
  tokens_.push_back(token);
  enqueue(static_cast<std::uint32_t>(tokens_.size() - 1));
  if (origin == TokenOrigin::cache_seed) ++counters_.cache_seeded;
}

void DeliveryEngine::enqueue(std::uint32_t token_id) {
  const TokenRecord& token = tokens_[token_id];
  pool_at(token.pool).queues[token.wanted_by].token_ids.push_back(token_id);
}

void DeliveryEngine::seed_phase1_packet(int user, SymbolId symbol) {
  phase1_[user].push_back(symbol);
  ++counters_.phase1_packets;
}

std::uint64_t DeliveryEngine::queue_size(UserSet pool, int user) const {
  const Pool& p = pools_[pool];
  if (p.queues.empty()) return 0;
  const Queue& q = p.queues[user];
  return q.token_ids.size() - q.head;
}

void DeliveryEngine::run_phase1_user(int user, BroadcastChannel& channel) {
  const UserSet me = 1u << user;
  std::uint64_t slots_used = 0;
  for (SymbolId symbol : phase1_[user]) {
    for (;;) {
      SlotRecord slot;
      slot.subphase = me;
      slot.symbol = symbol;
      slot.combo = {{symbol, std::uint8_t{1}}};
      slot.payload = payload_of(symbol);
      const UserSet state = channel.transmit(slot.payload);
      slot.state = state;
      transcript_.slots.push_back(std::move(slot));
      ++slots_used;
      if (state == 0) continue;  // nobody received, repeat the packet
      if (state & me) {
        ++counters_.phase1_direct;
      } else {
        TokenRecord token;
        token.symbol = symbol;
        token.wanted_by = static_cast<std::uint8_t>(user);
        token.known_by = state;
        token.pool = state | me;
        token.origin = TokenOrigin::phase1_upgrade;
        token.created_slot = static_cast<std::int64_t>(transcript_.slots.size()) - 1;
        tokens_.push_back(token);
        enqueue(static_cast<std::uint32_t>(tokens_.size() - 1));
        ++counters_.phase1_upgraded;
      }
      break;
    }
  }
  phase1_[user].clear();
  transcript_.subphase_lengths.push_back({me, slots_used});
}

void DeliveryEngine::run_phase1(BroadcastChannel& channel) {
  for (int user = 0; user < user_count_; ++user) run_phase1_user(user, channel);
}

void DeliveryEngine::run_subphase(UserSet pool_mask, BroadcastChannel& channel) {
  Pool& pool = pool_at(pool_mask);
  const UserSet outside = full_set(user_count_) & ~pool_mask;
  std::uint64_t slots_used = 0;

  std::vector<int> active;
  std::vector<std::uint8_t> coeffs;
  std::vector<std::pair<SymbolId, std::uint8_t>> combo;

  for (;;) {
    active.clear();
    for (int user = 0; user < user_count_; ++user)
      if (contains(pool_mask, user) && !pool.queues[user].empty()) active.push_back(user);
    if (active.empty()) break;

    // Fresh nonzero coefficient per head; when two heads carry clones of one
    // symbol the merged coefficient must not cancel, so redraw until it
    // doesn't.
    for (;;) {
      coeffs.resize(active.size());
      for (auto& c : coeffs) c = rng_.nonzero_byte();
      combo.clear();
      bool cancelled = false;
      for (std::size_t i = 0; i < active.size(); ++i) {
        const Queue& q = pool.queues[active[i]];
        const SymbolId sym = tokens_[q.token_ids[q.head]].symbol;
        auto it = std::find_if(combo.begin(), combo.end(),
                               [&](const auto& e) { return e.first == sym; });
        if (it == combo.end())
          combo.emplace_back(sym, coeffs[i]);
        else
          it->second ^= coeffs[i];
      }
      for (const auto& [sym, c] : combo)
        if (c == 0) cancelled = true;
      if (!cancelled) break;
    }

    SlotRecord slot;
    slot.subphase = pool_mask;
    slot.symbol = base_count_ + static_cast<SymbolId>(transcript_.slots.size());
    slot.combo = combo;
    slot.payload.assign(payload_of(combo.front().first).size(), 0);
    for (const auto& [sym, c] : combo) gf::axpy(slot.payload, c, payload_of(sym));

    const UserSet state = channel.transmit(slot.payload);
    slot.state = state;
    const std::int64_t slot_index = static_cast<std::int64_t>(transcript_.slots.size());
    transcript_.slots.push_back(std::move(slot));
    ++slots_used;

    const UserSet outside_receivers = state & outside;
    for (int user : active) {
      Queue& q = pool.queues[user];
      TokenRecord& head = tokens_[q.token_ids[q.head]];
      if (state & (1u << user)) {
        head.end = TokenEnd::direct;
        head.consumed_slot = slot_index;
        ++q.head;
        ++counters_.pool_direct;
      } else if (outside_receivers != 0) {
        head.end = TokenEnd::upgraded;
        head.consumed_slot = slot_index;
        ++q.head;
        ++counters_.pool_upgraded;

        TokenRecord token;
        token.symbol = base_count_ + static_cast<SymbolId>(slot_index);
        token.wanted_by = static_cast<std::uint8_t>(user);
        token.known_by = (pool_mask & ~(1u << user)) | outside_receivers;
        token.pool = pool_mask | outside_receivers;
        token.origin = TokenOrigin::subphase_upgrade;
        token.created_slot = slot_index;
        tokens_.push_back(token);
        enqueue(static_cast<std::uint32_t>(tokens_.size() - 1));
        ++counters_.upgrade_created;
      }
      // Otherwise the head stays pending for the next slot.
    }
  }

  transcript_.subphase_lengths.push_back({pool_mask, slots_used});
}

void DeliveryEngine::run_phases(int from_order, BroadcastChannel& channel) {
  const UserSet all = full_set(user_count_);
  for (int order = std::max(from_order, 2); order <= user_count_; ++order)
    for (UserSet mask = 0; mask <= all; ++mask)
      if (popcount(mask) == order) run_subphase(mask, channel);
}

DeliveryResult DeliveryEngine::finish() {
  for (const auto& token : tokens_)
    if (token.end == TokenEnd::pending) ++counters_.pending_left;
  DeliveryResult result;
  result.transcript = std::move(transcript_);
  result.tokens = std::move(tokens_);
  result.counters = counters_;
  return result;
}

namespace {

void check_demands(const std::vector<int>& demands, int user_count, int file_count) {
  if (static_cast<int>(demands.size()) != user_count)
    throw std::invalid_argument("delivery: need one demand per user");
  for (std::size_t a = 0; a < demands.size(); ++a) {
    if (demands[a] < 0 || demands[a] >= file_count)
      throw std::invalid_argument("delivery: demand out of range");
    for (std::size_t b = a + 1; b < demands.size(); ++b)
      if (demands[a] == demands[b])
        throw std::invalid_argument("delivery: duplicate demands are unsupported");
  }
}

}  // namespace

void seed_pools(DeliveryEngine& engine, const SubfileMap& subfiles,
                const std::vector<int>& demands) {
  const int K = subfiles.user_count;
  const int F = subfiles.packets_per_file;
  check_demands(demands, K, subfiles.file_count);

  for (int user = 0; user < K; ++user) {
    const int file = demands[user];
    const UserSet me = 1u << user;
    for (UserSet subset = 0; subset < (1u << K); ++subset) {
      if (subset & me) continue;  // already cached by the requester
      for (auto idx : subfiles.entry(file, subset)) {
        const SymbolId sym = static_cast<SymbolId>(file) * F + idx;
        if (subset == 0)
          engine.seed_phase1_packet(user, sym);
        else
          engine.seed_token(sym, user, subset, TokenOrigin::cache_seed);
      }
    }
  }
}

DeliveryResult run_delivery(const Library& library, const SubfileMap& subfiles,
                            const std::vector<int>& demands, const SystemParams& params,
                            BroadcastChannel& channel, Rng coding_rng) {
  params.validate();
  DeliveryEngine engine(params.user_count, &library.packets,
                        static_cast<SymbolId>(library.packets.size()), coding_rng);
  seed_pools(engine, subfiles, demands);
  engine.run_phase1(channel);
  engine.run_phases(2, channel);
  return engine.finish();
}

SeededRun run_seeded_phases(int user_count, int start_order, int tokens_per_subset,
                            int payload_bytes, BroadcastChannel& channel, Rng coding_rng) {
  if (start_order < 1 || start_order > user_count)
    throw std::invalid_argument("delivery: start_order out of range");
  if (tokens_per_subset < 1) throw std::invalid_argument("delivery: need tokens_per_subset >= 1");

  // Synthetic source packets, one block per (subset, member).
  std::vector<Payload> base;
  const UserSet all = full_set(user_count);
  struct Seed {
    UserSet subset;
    int user;
  };
  std::vector<Seed> seeds;
  for (UserSet mask = 0; mask <= all; ++mask) {
    if (popcount(mask) != start_order) continue;
    for (int user = 0; user < user_count; ++user)
      if (contains(mask, user)) seeds.push_back({mask, user});
  }
  base.reserve(seeds.size() * tokens_per_subset);
  for (std::size_t i = 0; i < seeds.size() * static_cast<std::size_t>(tokens_per_subset); ++i) {
    Payload p(payload_bytes);
    for (auto& b : p) b = coding_rng.byte();
    base.push_back(std::move(p));
  }

  DeliveryEngine engine(user_count, &base, static_cast<SymbolId>(base.size()), coding_rng);
  SymbolId next = 0;
  for (const auto& seed : seeds)
    for (int t = 0; t < tokens_per_subset; ++t) {
      if (start_order == 1)
        engine.seed_phase1_packet(seed.user, next++);  // private uncoded packets
      else
        engine.seed_token(next++, seed.user, seed.subset & ~(1u << seed.user),
                          TokenOrigin::synthetic_seed);
    }

  if (start_order == 1) engine.run_phase1(channel);
  engine.run_phases(std::max(start_order, 2), channel);

  SeededRun run;
  run.result = engine.finish();
  run.total_slots = run.result.transcript.total_slots();
  // One subset-wide packet per slot serves every member at once, so the rate
  // counts tokens_per_subset per subset, not per member.
  const double delivered =
      static_cast<double>(seeds.size() / start_order) * tokens_per_subset;
  run.measured_rate = delivered / static_cast<double>(run.total_slots);
  return run;
}

NoFeedbackResult run_delivery_no_feedback(const Library& library, const SubfileMap& subfiles,
                                          const std::vector<int>& demands,
                                          const SystemParams& params, BroadcastChannel& channel,
                                          Rng coding_rng, bool verify_decode) {
  params.validate();
  check_demands(demands, params.user_count, params.file_count);

  const int K = params.user_count;
  NoFeedbackResult result;
  result.decode_checked = verify_decode;
  result.decode_success.assign(K, 1);

  struct ReceivedRow {
    std::vector<std::uint8_t> coeffs;
    Payload payload;
  };
  std::vector<std::vector<ReceivedRow>> per_user_rows(K);

  for (UserSet audience = 1; audience < (1u << K); ++audience) {
    // Message for this subset: XOR of the subfiles its members miss, padded
    // to the longest. A member's cache cancels every other member's part, so
    // it can decode its own subfile once its reception count reaches that
    // subfile's size.
    std::uint64_t length = 0;
    std::vector<std::uint64_t> need(K, 0);
    for (int user = 0; user < K; ++user)
      if (contains(audience, user)) {
        need[user] = subfiles.entry(demands[user], audience & ~(1u << user)).size();
        length = std::max(length, need[user]);
      }
    if (length == 0) continue;

    std::vector<Payload> message(length, Payload(params.payload_bytes, 0));
    for (int user = 0; user < K; ++user) {
      if (!contains(audience, user)) continue;
      const auto& indices = subfiles.entry(demands[user], audience & ~(1u << user));
      for (std::size_t u = 0; u < indices.size(); ++u)
        gf::axpy(message[u], 1, library.at(demands[user], indices[u]));
    }

    std::vector<std::uint64_t> received(K, 0);
    if (verify_decode)
      for (int user = 0; user < K; ++user) per_user_rows[user].clear();

    std::uint64_t slots_used = 0;
    std::vector<std::uint8_t> coeffs(length);
    for (;;) {
      bool done = true;
      for (int user = 0; user < K; ++user)
        if (contains(audience, user) && received[user] < need[user]) done = false;
      if (done) break;

      for (auto& c : coeffs) c = coding_rng.byte();
      Payload payload(params.payload_bytes, 0);
      for (std::size_t u = 0; u < message.size(); ++u) gf::axpy(payload, coeffs[u], message[u]);
      const UserSet state = channel.transmit(payload);
      ++slots_used;
      for (int user = 0; user < K; ++user) {
        if (!contains(audience, user) || !contains(state, user)) continue;
        ++received[user];
        if (verify_decode && per_user_rows[user].size() < need[user] + 8)
          per_user_rows[user].push_back({coeffs, payload});
      }
    }

    if (verify_decode) {
      for (int user = 0; user < K; ++user) {
        if (!contains(audience, user) || need[user] == 0) continue;
        const auto& indices = subfiles.entry(demands[user], audience & ~(1u << user));
        // Restrict each received combination to this user's own coordinates;
        // the rest of the message is reproducible from its cache.
        std::vector<gf::LinearRow> rows;
        for (auto& r : per_user_rows[user]) {
          gf::LinearRow row;
          row.coeffs.assign(r.coeffs.begin(),
                            r.coeffs.begin() + static_cast<std::ptrdiff_t>(need[user]));
          row.rhs = std::move(r.payload);
          for (std::size_t u = 0; u < message.size(); ++u) {
            if (r.coeffs[u] == 0) continue;
            for (int other = 0; other < K; ++other) {
              if (other == user || !contains(audience, other)) continue;
              const auto& oidx = subfiles.entry(demands[other], audience & ~(1u << other));
              if (u < oidx.size())
                gf::axpy(row.rhs, r.coeffs[u], library.at(demands[other], oidx[u]));
            }
          }
          rows.push_back(std::move(row));
        }
        auto solved = gf::solve_linear_system(std::move(rows), need[user]);
        if (!solved) {
          result.decode_success[user] = 0;
          continue;
        }
        for (std::size_t u = 0; u < indices.size(); ++u)
          if ((*solved)[u] != library.at(demands[user], indices[u]))
            result.decode_success[user] = 0;
      }
    }

    result.messages.push_back({audience, length, slots_used});
    result.total_slots += slots_used;
  }
  return result;
}

ConservationReport audit_conservation(const DeliveryResult& run, int user_count) {
  ConservationReport report;
  auto fail = [&](std::string why) {
    report.ok = false;
    if (!report.detail.empty()) report.detail += "; ";
    report.detail += std::move(why);
  };

  const UserSet all = full_set(user_count);
  std::uint64_t upgraded = 0;
  std::uint64_t created_by_upgrade = 0;
  for (const auto& token : run.tokens) {
    if (contains(token.known_by, token.wanted_by)) fail("token wanted by a knowing user");
    if (token.pool != (token.known_by | (1u << token.wanted_by))) fail("pool/known_by mismatch");
    if (token.end == TokenEnd::pending) fail("token left pending");
    if (token.end == TokenEnd::upgraded) {
      ++upgraded;
      if (token.pool == all) fail("order-K token upgraded");
    }
    if (token.origin == TokenOrigin::subphase_upgrade) ++created_by_upgrade;
  }
  if (created_by_upgrade != run.counters.pool_upgraded)
    fail("upgrade consumption/creation counts differ");
  if (upgraded != run.counters.pool_upgraded) fail("upgraded token count mismatch");
  if (run.counters.pending_left != 0) fail("engine reported leftover tokens");

  const std::uint64_t tokens_total = run.tokens.size();
  const std::uint64_t consumed = run.counters.pool_direct + run.counters.pool_upgraded;
  if (tokens_total != consumed) fail("token count != consumption count");

  const std::uint64_t phase1_total =
      run.counters.phase1_direct + run.counters.phase1_upgraded;
  if (phase1_total != run.counters.phase1_packets) fail("phase-1 packet accounting mismatch");

  return report;
}

}  // namespace bpec
