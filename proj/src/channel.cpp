#include "bpec/channel.hpp"

#include <stdexcept>

namespace bpec {

ErasureChannel::ErasureChannel(int users, double delta, Rng rng)
    : users_(users), delta_(delta), rng_(rng) {
  if (users < 1 || users > kMaxUsers) throw std::invalid_argument("channel: bad user count");
  if (delta < 0.0 || delta >= 1.0) throw std::invalid_argument("channel: delta must be in [0,1)");
}

UserSet ErasureChannel::transmit(const Payload&) {
  UserSet received = 0;
  for (int k = 0; k < users_; ++k)
    if (!rng_.bernoulli(delta_)) received |= 1u << k;
  history_.push_back(received);
  return received;
}

UserSet ReplayChannel::transmit(const Payload&) {
  if (history_.size() >= script_.size())
    throw std::out_of_range("replay channel: script exhausted");
  const UserSet s = script_[history_.size()];
  history_.push_back(s);
  return s;
}

}  // namespace bpec
