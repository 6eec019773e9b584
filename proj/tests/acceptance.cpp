// Acceptance suite: each criterion prints one PASS/FAIL line; the process
// exits nonzero if any criterion fails.

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "bpec/analytics.hpp"
#include "bpec/channel.hpp"
#include "bpec/delivery.hpp"
#include "bpec/experiment.hpp"
#include "bpec/gf256.hpp"
#include "bpec/placement.hpp"

using namespace bpec;

namespace {

int failures = 0;

void criterion(int index, const std::string& name, bool ok, const std::string& detail = "") {
  std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", index, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

bool close(double a, double b, double rel) {
  if (a == b) return true;
  return std::abs(a - b) <= rel * std::abs(b);
}

SystemParams make(int K, int N, double M, int F, double delta, int P, std::uint64_t seed) {
  SystemParams p;
  p.user_count = K;
  p.file_count = N;
  p.memory = M;
  p.packets_per_file = F;
  p.erasure_prob = delta;
  p.payload_bytes = P;
  p.seed = seed;
  return p;
}

// ---------------------------------------------------------------------------

void criterion1_formula_identities() {
  bool ok = true;
  std::string detail;
  for (int K = 2; K <= 10 && ok; ++K)
    for (int di = 0; di <= 9 && ok; ++di)
      for (int pi = 0; pi <= 10 && ok; ++pi) {
        const double d = di / 10.0;
        const double p = pi / 10.0;

        const double rsym = analytics::symmetric_rate(K, p, d);
        const double cached = analytics::cache_rate_composed(K, p, d);
        if (std::isinf(rsym) || std::isinf(cached)) {
          ok = std::isinf(rsym) && std::isinf(cached);
          if (!ok) detail = "p=1 sentinel mismatch";
          continue;
        }
        if (!close(cached, K * rsym, 1e-10)) {
          ok = false;
          detail = "cache rate != K*R_sym";
        }
        if (pi == 0) {
          if (!close(analytics::order1_rate_composed(K, d), K * rsym, 1e-10)) {
            ok = false;
            detail = "composed order-1 rate != K*R_sym";
          }
          for (int i = 1; i <= K && ok; ++i)
            if (!close(analytics::seeded_phase_plan(K, d, i, 1000.0).rate,
                       analytics::order_rate_bound(K, i, d), 1e-10)) {
              ok = false;
              detail = "seeded plan rate != order rate bound";
            }
          if (ok && analytics::length_decomposition_residual(K, d, 1.0) >= 1e-10) {
            ok = false;
            detail = "length decomposition residual too large";
          }
        }
        if (ok && pi >= 1) {
          const double product =
              (1.0 / p) * (1 - p) * (1 - std::pow(1 - p, K));
          if (!close(analytics::completion_time(K, p, 0.0), product, 1e-12)) {
            ok = false;
            detail = "delta=0 closed form mismatch";
          }
        }
      }
  criterion(1, "formula identities over the full (K, delta, p) grid", ok, detail);
}

void criterion2_endpoints() {
  const double t00 = analytics::completion_time(10, 0.0, 0.0);
  const double t06 = analytics::completion_time(10, 0.0, 0.6);
  const double nofb06 = analytics::completion_time_no_feedback(10, 0.0, 0.6);
  const bool ok = t00 == 10.0 && std::abs(t06 - 12.6823) <= 1e-3 && close(nofb06, 25.0, 1e-12);
  char detail[128];
  std::snprintf(detail, sizeof detail, "T(0,0)=%g T(0,0.6)=%.6f Tnofb(0,0.6)=%g", t00, t06,
                nofb06);
  criterion(2, "completion-time endpoints at N=100, K=10", ok, detail);
}

struct CampaignResult {
  double mean_ratio = 0.0;
  double worst_subphase_err = 0.0;
  int decode_ok = 0;
  int decode_total = 0;
  int wrong_payloads = 0;
  bool conservation_ok = true;
};

CampaignResult run_campaign(const SystemParams& params, int replicas) {
  const int K = params.user_count;
  CampaignResult result;
  std::map<UserSet, double> mean_lengths;

  for (int rep = 0; rep < replicas; ++rep) {
    const std::uint64_t r = static_cast<std::uint64_t>(rep);
    Rng lib_rng(params.seed, Rng::Stream::library, r);
    Rng place_rng(params.seed, Rng::Stream::placement, r);
    const Library library = generate_library(params, lib_rng);
    const CacheTable cache = place_decentralized(params, place_rng);
    const SubfileMap subfiles = subfile_partition(cache, params);
    std::vector<int> demands(K);
    for (int k = 0; k < K; ++k) demands[k] = k;

    ErasureChannel channel(K, params.erasure_prob, Rng(params.seed, Rng::Stream::channel, r));
    DeliveryResult run = run_delivery(library, subfiles, demands, params, channel,
                                      Rng(params.seed, Rng::Stream::coding, r));

    result.mean_ratio +=
        static_cast<double>(run.transcript.total_slots()) / params.packets_per_file / replicas;
    for (const auto& entry : run.transcript.subphase_lengths)
      mean_lengths[entry.subphase] += static_cast<double>(entry.slots) / replicas;
    if (!audit_conservation(run, K).ok) result.conservation_ok = false;

    for (int k = 0; k < K; ++k) {
      ++result.decode_total;
      const DecodeResult decoded = decode_user(k, run, library, subfiles, demands);
      if (!decoded.success) continue;
      bool exact = true;
      for (int f = 0; f < params.packets_per_file && exact; ++f)
        exact = decoded.file[f] == library.at(demands[k], f);
      if (exact)
        ++result.decode_ok;
      else
        ++result.wrong_payloads;
    }
  }

  const auto plan = analytics::phase_plan(K, params.erasure_prob, params.effective_fraction(),
                                          params.packets_per_file);
  for (const auto& [mask, mean_len] : mean_lengths) {
    const double predicted = plan.subphase_len[popcount(mask)];
    if (predicted < 1.0) continue;  // vanishing subphases carry no signal
    result.worst_subphase_err =
        std::max(result.worst_subphase_err, std::abs(mean_len - predicted) / predicted);
  }
  return result;
}

CampaignResult g_k3_campaign;
CampaignResult g_k4_campaign;

void criterion3_simulation_vs_theory() {
  const auto params3 = make(3, 3, 1, 100000, 0.3, 8, 31);
  g_k3_campaign = run_campaign(params3, 10);
  const double predict3 =
      analytics::completion_time(3, params3.effective_fraction(), params3.erasure_prob);
  const bool ok3 = close(g_k3_campaign.mean_ratio, predict3, 0.03) &&
                   g_k3_campaign.worst_subphase_err < 0.05;

  const auto params4 = make(4, 4, 1, 50000, 0.5, 8, 32);
  g_k4_campaign = run_campaign(params4, 10);
  const double predict4 =
      analytics::completion_time(4, params4.effective_fraction(), params4.erasure_prob);
  const bool ok4 = close(g_k4_campaign.mean_ratio, predict4, 0.05) &&
                   g_k4_campaign.worst_subphase_err < 0.05;

  char detail[160];
  std::snprintf(detail, sizeof detail,
                "K=3 mean=%.4f predicted=%.4f subphase_err=%.3f; K=4 mean=%.4f predicted=%.4f "
                "subphase_err=%.3f",
                g_k3_campaign.mean_ratio, predict3, g_k3_campaign.worst_subphase_err,
                g_k4_campaign.mean_ratio, predict4, g_k4_campaign.worst_subphase_err);
  criterion(3, "measured completion and subphase lengths track the predictions", ok3 && ok4,
            detail);
}

void criterion4_decode() {
  const int ok_total = g_k3_campaign.decode_ok + g_k4_campaign.decode_ok;
  const int total = g_k3_campaign.decode_total + g_k4_campaign.decode_total;
  const int wrong = g_k3_campaign.wrong_payloads + g_k4_campaign.wrong_payloads;
  const bool ok = total > 0 && ok_total >= static_cast<int>(std::ceil(0.95 * total)) && wrong == 0;
  char detail[96];
  std::snprintf(detail, sizeof detail, "%d/%d decodes bit-exact, %d wrong payloads", ok_total,
                total, wrong);
  criterion(4, "decode success rate and bit-exactness", ok, detail);
}

void criterion5_order_rate() {
  ErasureChannel channel(4, 0.4, Rng(51, Rng::Stream::channel));
  const auto run = run_seeded_phases(4, 2, 10000, 4, channel, Rng(51, Rng::Stream::coding));
  const double bound = analytics::order_rate_bound(4, 2, 0.4);
  const bool ok = close(run.measured_rate, bound, 0.05);
  char detail[96];
  std::snprintf(detail, sizeof detail, "measured=%.5f bound=%.5f", run.measured_rate, bound);
  criterion(5, "mid-order start achieves the order rate bound", ok, detail);
}

void criterion6_no_feedback() {
  const auto params = make(10, 100, 20, 10000, 0.6, 4, 61);
  const int replicas = 5;
  double mean_nofb = 0.0;
  double mean_realized_load = 0.0;  // sum of padded message lengths per packet
  bool feedback_wins = true;

  for (int rep = 0; rep < replicas; ++rep) {
    const std::uint64_t r = static_cast<std::uint64_t>(rep);
    Rng lib_rng(params.seed, Rng::Stream::library, r);
    Rng place_rng(params.seed, Rng::Stream::placement, r);
    const Library library = generate_library(params, lib_rng);
    const SubfileMap subfiles = subfile_partition(place_decentralized(params, place_rng), params);
    std::vector<int> demands(10);
    for (int k = 0; k < 10; ++k) demands[k] = k;

    ErasureChannel fb_channel(10, 0.6, Rng(params.seed, Rng::Stream::channel, r));
    const auto fb = run_delivery(library, subfiles, demands, params, fb_channel,
                                 Rng(params.seed, Rng::Stream::coding, r));

    ErasureChannel nofb_channel(10, 0.6, Rng(params.seed, Rng::Stream::channel, r));
    const auto nofb = run_delivery_no_feedback(library, subfiles, demands, params, nofb_channel,
                                               Rng(params.seed, Rng::Stream::coding_nofb, r),
                                               false);
    mean_nofb += static_cast<double>(nofb.total_slots) / params.packets_per_file / replicas;
    std::uint64_t realized = 0;
    for (const auto& msg : nofb.messages) realized += msg.length;
    mean_realized_load += static_cast<double>(realized) / params.packets_per_file / replicas;
    if (fb.transcript.total_slots() >= nofb.total_slots) feedback_wins = false;
  }

  const double predicted = analytics::completion_time_no_feedback(
      10, params.effective_fraction(), params.erasure_prob);
  const bool ok = close(mean_nofb, predicted, 0.03) && feedback_wins;
  // When this fails, the decomposition localizes the gap: the realized
  // multicast load (messages padded to their largest member subfile) already
  // exceeds the mean-size load the prediction assumes; the measured expansion
  // over the realized load stays close to 1/(1-delta).
  char detail[192];
  std::snprintf(detail, sizeof detail,
                "mean_nofb=%.4f predicted=%.4f realized_load=%.4f realized_load/(1-delta)=%.4f "
                "feedback_wins=%d",
                mean_nofb, predicted, mean_realized_load,
                mean_realized_load / (1 - params.erasure_prob), feedback_wins ? 1 : 0);
  criterion(6, "no-feedback baseline length and matched-seed dominance", ok, detail);
}

void criterion7_placement() {
  const int F = 100000;
  const auto params = make(3, 4, 2.0, F, 0.0, 1, 71);  // p = 0.5
  Rng place_rng(params.seed, Rng::Stream::placement);
  const auto subfiles = subfile_partition(place_decentralized(params, place_rng), params);

  bool ok = true;
  const double p = 0.5;
  for (int file = 0; file < 4 && ok; ++file)
    for (UserSet subset = 0; subset < 8 && ok; ++subset) {
      const double expect = std::pow(p, popcount(subset)) * std::pow(1 - p, 3 - popcount(subset));
      const double sigma = std::sqrt(expect * (1 - expect) / F);
      const double got = static_cast<double>(subfiles.entry(file, subset).size()) / F;
      ok = std::abs(got - expect) < 4 * sigma;
    }
  for (UserSet users = 0; users < 8 && ok; ++users) {
    const double expect = std::pow(0.5, popcount(users));
    const double sigma =
        users == 0 ? 0.0 : std::sqrt(expect * (1 - expect) / F);
    const double got = uncached_fraction(subfiles, 0, users);
    ok = users == 0 ? got == 1.0 : std::abs(got - expect) < 4 * sigma;
  }
  criterion(7, "placement statistics match the product law and residual law", ok);
}

void criterion8_property_suites() {
  bool gf_ok = true;
  for (int a = 0; a < 256 && gf_ok; ++a)
    for (int b = 0; b < 256 && gf_ok; ++b) {
      const auto ua = static_cast<std::uint8_t>(a);
      const auto ub = static_cast<std::uint8_t>(b);
      if (gf::mul(ua, ub) != gf::mul(ub, ua)) gf_ok = false;
      if (gf::add(ua, ub) != gf::add(ub, ua)) gf_ok = false;
      if (b != 0 && gf::mul(gf::mul(ua, ub), gf::inv(ub)) != a) gf_ok = false;
    }
  Rng rng(81, Rng::Stream::coding);
  for (int it = 0; it < 300000 && gf_ok; ++it) {
    const std::uint8_t a = rng.byte(), b = rng.byte(), c = rng.byte();
    if (gf::mul(gf::mul(a, b), c) != gf::mul(a, gf::mul(b, c))) gf_ok = false;
    if (gf::mul(a, gf::add(b, c)) != gf::add(gf::mul(a, b), gf::mul(a, c))) gf_ok = false;
  }

  const bool conservation_ok = g_k3_campaign.conservation_ok && g_k4_campaign.conservation_ok;

  // Causality: rerunning against the recorded states reproduces the
  // transcript byte for byte.
  bool replay_ok = true;
  {
    const auto params = make(3, 3, 1, 5000, 0.3, 8, 82);
    Rng lib_rng(params.seed, Rng::Stream::library);
    Rng place_rng(params.seed, Rng::Stream::placement);
    const Library library = generate_library(params, lib_rng);
    const SubfileMap subfiles = subfile_partition(place_decentralized(params, place_rng), params);
    const std::vector<int> demands = {0, 1, 2};
    ErasureChannel live(3, 0.3, Rng(params.seed, Rng::Stream::channel));
    const auto first = run_delivery(library, subfiles, demands, params, live,
                                    Rng(params.seed, Rng::Stream::coding));
    ReplayChannel replay(3, live.state_history());
    const auto second = run_delivery(library, subfiles, demands, params, replay,
                                     Rng(params.seed, Rng::Stream::coding));
    replay_ok = first.transcript.slots.size() == second.transcript.slots.size();
    for (std::size_t i = 0; replay_ok && i < first.transcript.slots.size(); ++i) {
      const auto& x = first.transcript.slots[i];
      const auto& y = second.transcript.slots[i];
      replay_ok = x.subphase == y.subphase && x.state == y.state && x.combo == y.combo &&
                  x.payload == y.payload;
    }
  }

  bool csv_ok = true;
  {
    RunConfig config;
    config.params = make(3, 3, 1, 2000, 0.25, 8, 83);
    config.replicas = 4;
    config.with_nofb = true;
    const auto once = cmd_simulate(config);
    const auto twice = cmd_simulate(config);
    config.jobs = 4;
    const auto parallel = cmd_simulate(config);
    csv_ok = once.csv == twice.csv && once.csv == parallel.csv;
  }

  char detail[128];
  std::snprintf(detail, sizeof detail, "gf=%d conservation=%d replay=%d csv=%d", gf_ok ? 1 : 0,
                conservation_ok ? 1 : 0, replay_ok ? 1 : 0, csv_ok ? 1 : 0);
  criterion(8, "field axioms, token conservation, causality replay, CSV determinism",
            gf_ok && conservation_ok && replay_ok && csv_ok, detail);
}

}  // namespace

int main() {
  criterion1_formula_identities();
  criterion2_endpoints();
  criterion3_simulation_vs_theory();
  criterion4_decode();
  criterion5_order_rate();
  criterion6_no_feedback();
  criterion7_placement();
  criterion8_property_suites();
  if (failures == 0)
    std::printf("all acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
