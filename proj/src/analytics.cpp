#include "bpec/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bpec::analytics {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_kpd(int K, double p, double delta) {
  if (K < 1 || K > kMaxUsers) throw std::invalid_argument("analytics: K out of range");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("analytics: p out of range");
  if (delta < 0.0 || delta >= 1.0) throw std::invalid_argument("analytics: delta out of range");
}
}  // namespace

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double completion_time(int K, double p, double delta) {
  check_kpd(K, p, delta);
  double sum = 0.0;
  for (int k = 1; k <= K; ++k) sum += std::pow(1.0 - p, k) / (1.0 - std::pow(delta, k));
  return sum;
}

double symmetric_rate(int K, double p, double delta) {
  const double t = completion_time(K, p, delta);
  return t == 0.0 ? kInf : 1.0 / t;
}

double completion_time_no_feedback(int K, double p, double delta) {
  check_kpd(K, p, delta);
  double sum = 0.0;
  for (int k = 1; k <= K; ++k) sum += std::pow(1.0 - p, k);
  return sum / (1.0 - delta);
}

Achievability is_achievable(const std::vector<double>& rates, double p, double delta) {
  const int K = static_cast<int>(rates.size());
  check_kpd(K, p, delta);
  for (double r : rates)
    if (r < 0.0) throw std::invalid_argument("analytics: rates must be nonnegative");

  std::vector<double> weights(K);
  for (int k = 1; k <= K; ++k)
    weights[k - 1] = std::pow(1.0 - p, k) / (1.0 - std::pow(delta, k));

  // Weights decrease in k; the worst permutation sorts rates descending.
  std::vector<int> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rates[a] > rates[b]; });

  Achievability out;
  out.binding_permutation = order;
  for (int k = 0; k < K; ++k) out.max_weighted_sum += weights[k] * rates[order[k]];
  out.slack = 1.0 - out.max_weighted_sum;
  out.achievable = out.max_weighted_sum <= 1.0 + 1e-12;
  return out;
}

double upgrade_prob(int K, double delta, int i, int j) {
  if (!(1 <= i && i < j && j <= K)) throw std::invalid_argument("analytics: need 1 <= i < j <= K");
  return std::pow(delta, K - j + 1) * std::pow(1.0 - delta, j - i);
}

double consume_prob(int K, double delta, int j) {
  if (!(1 <= j && j <= K)) throw std::invalid_argument("analytics: need 1 <= j <= K");
  return 1.0 - std::pow(delta, K - j + 1);
}

double PhasePlan::total_slots() const {
  const int K = user_count;
  double total = K * subphase_len[1];
  for (int j = 2; j <= K; ++j) total += binom(K, j) * subphase_len[j];
  return total;
}

PhasePlan phase_plan(int K, double delta, double p, double F) {
  check_kpd(K, p, delta);
  PhasePlan plan;
  plan.user_count = K;
  plan.n0 = F * std::pow(1.0 - p, K);
  plan.cache_counts.assign(K + 1, 0.0);
  for (int j = 2; j <= K; ++j)
    plan.cache_counts[j] = F * std::pow(p, j - 1) * std::pow(1.0 - p, K - j + 1);
  plan.upgrade_counts.assign(K + 1, std::vector<double>(K + 1, 0.0));
  plan.subphase_len.assign(K + 1, 0.0);

  plan.subphase_len[1] = plan.n0 / consume_prob(K, delta, 1);
  for (int j = 2; j <= K; ++j) {
    for (int i = 1; i < j; ++i)
      plan.upgrade_counts[i][j] = plan.subphase_len[i] * upgrade_prob(K, delta, i, j);
    double pending = plan.cache_counts[j];
    for (int i = 1; i < j; ++i) pending += binom(j - 1, i - 1) * plan.upgrade_counts[i][j];
    plan.subphase_len[j] = pending / consume_prob(K, delta, j);
  }
  return plan;
}

double order_rate_bound(int K, int i, double delta) {
  if (!(1 <= i && i <= K)) throw std::invalid_argument("analytics: need 1 <= i <= K");
  double denom = 0.0;
  for (int k = 1; k <= K - i + 1; ++k)
    denom += binom(K - k, i - 1) / (1.0 - std::pow(delta, k));
  return binom(K, i) / denom;
}

SeededPhasePlan seeded_phase_plan(int K, double delta, int start_order, double n_start) {
  if (!(1 <= start_order && start_order <= K))
    throw std::invalid_argument("analytics: start_order out of range");
  SeededPhasePlan plan;
  plan.start_order = start_order;
  plan.subphase_len.assign(K + 1, 0.0);
  plan.subphase_len[start_order] = n_start / consume_prob(K, delta, start_order);
  for (int j = start_order + 1; j <= K; ++j) {
    double pending = 0.0;
    for (int l = start_order; l < j; ++l)
      pending += binom(j - 1, l - 1) * plan.subphase_len[l] * upgrade_prob(K, delta, l, j);
    plan.subphase_len[j] = pending / consume_prob(K, delta, j);
  }
  for (int j = start_order; j <= K; ++j) plan.total_slots += binom(K, j) * plan.subphase_len[j];
  plan.rate = binom(K, start_order) * n_start / plan.total_slots;
  return plan;
}

double order1_rate_composed(int K, double delta) {
  return cache_rate_composed(K, 0.0, delta);
}

double cache_rate_composed(int K, double p, double delta) {
  check_kpd(K, p, delta);
  if (p >= 1.0) return kInf;
  // Time decomposition per packet of file size: phase 1 plus, for every
  // order, the full cascade of the packets handed to it (cache-seeded and
  // phase-1 upgrades) served at that order's sum rate. Each user receives one
  // file over that time.
  const double n0 = std::pow(1.0 - p, K);
  const double t1 = n0 / consume_prob(K, delta, 1);
  double denom = K * t1;
  for (int j = 2; j <= K; ++j) {
    const double cache_j = std::pow(p, j - 1) * std::pow(1.0 - p, K - j + 1);
    const double upgraded_j = t1 * upgrade_prob(K, delta, 1, j);
    denom += binom(K, j) * (cache_j + upgraded_j) / order_rate_bound(K, j, delta);
  }
  return K / denom;
}

double length_decomposition_residual(int K, double delta, double n1) {
  check_kpd(K, 0.0, delta);
  // Plain delivery seeded with n1 uncoded packets per user.
  const SeededPhasePlan base = seeded_phase_plan(K, delta, 1, n1);
  double max_residual = 0.0;
  for (int j = 2; j <= K; ++j) {
    double recomposed = 0.0;
    for (int i = 2; i <= j; ++i) {
      const double handed = base.subphase_len[1] * upgrade_prob(K, delta, 1, i);
      recomposed += seeded_phase_plan(K, delta, i, handed).subphase_len[j];
    }
    max_residual = std::max(max_residual, std::abs(base.subphase_len[j] - recomposed));
  }
  return max_residual;
}

}  // namespace bpec::analytics
