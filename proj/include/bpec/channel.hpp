#pragma once

#include <cstdint>
#include <vector>

#include "bpec/gf256.hpp"
#include "bpec/params.hpp"
#include "bpec/rng.hpp"

namespace bpec {

// Memoryless K-user broadcast packet erasure channel. transmit() commits the
// slot and only then reveals its state, so a caller can never condition the
// payload of slot i on S_i; the encoder side sees states strictly with one
// slot of delay.
class BroadcastChannel {
 public:
  virtual ~BroadcastChannel() = default;

  // Sends one packet; returns the set of users that received it.
  virtual UserSet transmit(const Payload& x) = 0;

  virtual int user_count() const = 0;

  // Full state sequence so far; receivers read it after transmission ends.
  virtual const std::vector<UserSet>& state_history() const = 0;

  std::uint64_t slots() const { return state_history().size(); }
};

// Each user independently erases each slot with probability delta, i.i.d.
// across users and slots.
class ErasureChannel final : public BroadcastChannel {
 public:
  ErasureChannel(int users, double delta, Rng rng);

  UserSet transmit(const Payload& x) override;
  int user_count() const override { return users_; }
  const std::vector<UserSet>& state_history() const override { return history_; }

 private:
  int users_;
  double delta_;
  Rng rng_;
  std::vector<UserSet> history_;
};

// Replays a recorded state sequence; used to audit that a delivery run is a
// deterministic function of (inputs, coding stream, past states).
class ReplayChannel final : public BroadcastChannel {
 public:
  ReplayChannel(int users, std::vector<UserSet> states)
      : users_(users), script_(std::move(states)) {}

  UserSet transmit(const Payload&) override;
  int user_count() const override { return users_; }
  const std::vector<UserSet>& state_history() const override { return history_; }

 private:
  int users_;
  std::vector<UserSet> script_;
  std::vector<UserSet> history_;
};

}  // namespace bpec
