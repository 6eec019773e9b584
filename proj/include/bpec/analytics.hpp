#pragma once

#include <vector>

#include "bpec/params.hpp"

namespace bpec::analytics {

// C(n, k) in double precision, exact for the n <= 16 used here.
double binom(int n, int k);

// Per-user symmetric rate on the boundary of the achievable region:
// 1 / sum_{k=1..K} (1-p)^k / (1-delta^k). Returns +inf when p = 1.
double symmetric_rate(int K, double p, double delta);

// Slots needed per packet of file size to serve K distinct demands:
// sum_{k=1..K} (1-p)^k / (1-delta^k).
double completion_time(int K, double p, double delta);

// Same load without state feedback: every packet must reach all of its
// audience directly, expanding the erasure-free load by 1/(1-delta).
double completion_time_no_feedback(int K, double p, double delta);

struct Achievability {
  bool achievable = false;
  double max_weighted_sum = 0.0;       // largest LHS over permutations
  double slack = 0.0;                  // 1 - max_weighted_sum
  std::vector<int> binding_permutation;  // rate index assigned to weight k
};

// Checks sum_k w_k * R_{pi_k} <= 1 for every permutation pi, where
// w_k = (1-p)^k/(1-delta^k). The weights are decreasing in k, so the binding
// permutation pairs the largest rate with the largest weight; for K <= 6 the
// check is also run exhaustively in tests.
Achievability is_achievable(const std::vector<double>& rates, double p, double delta);

// Probability that a packet pending for a user in an order-i subphase turns
// into an order-j packet: the user and everybody outside the order-j target
// erased, the j-i new members received.
double upgrade_prob(int K, double delta, int i, int j);

// Probability that one slot resolves a pending packet for its user: the user
// itself or anyone outside the order-j target receives.
double consume_prob(int K, double delta, int j);

// Expected subphase lengths and packet flows for a full delivery starting
// from cache state p with files of F packets. Index convention: entry [j]
// refers to order j (index 0 unused).
struct PhasePlan {
  int user_count = 0;
  double n0 = 0.0;                      // uncached packets per user, F(1-p)^K
  std::vector<double> cache_counts;     // [j]: packets seeded by caching per subset
  std::vector<std::vector<double>> upgrade_counts;  // [i][j]: flow i -> j per subset
  std::vector<double> subphase_len;     // [j]: slots per subphase of order j

  // K * t_1 + sum_j C(K,j) t_j; coincides with completion_time * F.
  double total_slots() const;
};

PhasePlan phase_plan(int K, double delta, double p, double F);

// Largest total rate at which order-i packets (one stream per i-subset) can
// be delivered with feedback: C(K,i) / sum_{k=1..K-i+1} C(K-k,i-1)/(1-delta^k).
double order_rate_bound(int K, int i, double delta);

// Delivery that starts directly at order i with n_start packets per subset:
// subphase lengths for j = i..K and the resulting sum rate, which meets
// order_rate_bound exactly.
struct SeededPhasePlan {
  int start_order = 0;
  std::vector<double> subphase_len;  // [j] for j >= start_order
  double total_slots = 0.0;
  double rate = 0.0;
};

SeededPhasePlan seeded_phase_plan(int K, double delta, int start_order, double n_start);

// Order-1 sum rate recomposed from the time spent in phase 1 plus the time
// the higher-order streams need at their own rates; equals
// K * symmetric_rate(K, 0, delta).
double order1_rate_composed(int K, double delta);

// Same composition with the cache-seeded packets included; equals
// K * symmetric_rate(K, p, delta).
double cache_rate_composed(int K, double p, double delta);

// Max over j = 2..K of |t_j(n1) - sum_{i=2..j} t^i_j(n_{1->i})|: the order-j
// subphase length decomposes exactly into the seeded plans of the packets
// phase 1 handed to each order.
double length_decomposition_residual(int K, double delta, double n1);

}  // namespace bpec::analytics
