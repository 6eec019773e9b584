#include "bpec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <stdexcept>

#include "bpec/analytics.hpp"
#include "bpec/channel.hpp"
#include "bpec/placement.hpp"

namespace bpec {

std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

ReplicaReport run_replica(const SystemParams& params, int replica, const SimulateOptions& opt) {
  params.validate();
  const int K = params.user_count;
  const std::uint64_t r = static_cast<std::uint64_t>(replica);

  Rng library_rng(params.seed, Rng::Stream::library, r);
  Rng placement_rng(params.seed, Rng::Stream::placement, r);
  const Library library = generate_library(params, library_rng);
  const CacheTable cache = place_decentralized(params, placement_rng);
  const SubfileMap subfiles = subfile_partition(cache, params);

  std::vector<int> demands(K);
  for (int k = 0; k < K; ++k) demands[k] = k;

  ReplicaReport report;
  report.replica = replica;
  report.effective_fraction = params.effective_fraction();
  report.predicted_per_packet =
      analytics::completion_time(K, report.effective_fraction, params.erasure_prob);

  {
    ErasureChannel channel(K, params.erasure_prob, Rng(params.seed, Rng::Stream::channel, r));
    DeliveryResult run = run_delivery(library, subfiles, demands, params, channel,
                                      Rng(params.seed, Rng::Stream::coding, r));
    report.slots = run.transcript.total_slots();
    report.slots_per_packet = static_cast<double>(report.slots) / params.packets_per_file;
    report.relative_error = report.predicted_per_packet == 0.0
                                ? report.slots_per_packet
                                : std::abs(report.slots_per_packet - report.predicted_per_packet) /
                                      report.predicted_per_packet;
    report.conservation_ok = audit_conservation(run, K).ok;
    if (opt.keep_subphase_lengths) report.subphase_lengths = run.transcript.subphase_lengths;

    if (opt.verify_decode) {
      report.decode_checked = true;
      report.decode_total = K;
      for (int k = 0; k < K; ++k) {
        DecodeResult decoded = decode_user(k, run, library, subfiles, demands);
        bool exact = decoded.success;
        if (exact)
          for (int idx = 0; idx < params.packets_per_file && exact; ++idx)
            exact = decoded.file[idx] == library.at(demands[k], idx);
        if (exact) ++report.decode_ok;
      }
    }
  }

  if (opt.with_nofb) {
    // Same channel substream: the baseline sees the identical erasure pattern
    // slot for slot.
    ErasureChannel channel(K, params.erasure_prob, Rng(params.seed, Rng::Stream::channel, r));
    NoFeedbackResult nofb =
        run_delivery_no_feedback(library, subfiles, demands, params, channel,
                                 Rng(params.seed, Rng::Stream::coding_nofb, r), false);
    report.has_nofb = true;
    report.nofb_slots = nofb.total_slots;
    report.nofb_per_packet = static_cast<double>(nofb.total_slots) / params.packets_per_file;
    report.nofb_predicted_per_packet = analytics::completion_time_no_feedback(
        K, report.effective_fraction, params.erasure_prob);
  }
  return report;
}

namespace {

std::vector<double> default_grid(double from, double to, double step) {
  std::vector<double> grid;
  for (double v = from; v <= to + 1e-9; v += step) grid.push_back(std::min(v, to));
  return grid;
}

void append_row(std::string& csv, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) csv += ',';
    csv += cells[i];
  }
  csv += '\n';
}

}  // namespace

std::string cmd_analytic(const RunConfig& config) {
  const SystemParams& base = config.params;
  std::vector<double> m_values = config.m_grid.empty()
                                     ? std::vector<double>{base.memory}
                                     : config.m_grid;
  std::vector<double> d_values = config.delta_grid.empty()
                                     ? std::vector<double>{base.erasure_prob}
                                     : config.delta_grid;
  std::string csv = "K,N,M,delta,R_sym,T_tot_per_F,T_tot_nofb_per_F\n";
  for (double m : m_values)
    for (double d : d_values) {
      if (m < 0 || m > base.file_count)
        throw std::invalid_argument("analytic: M out of range");
      if (d < 0 || d >= 1) throw std::invalid_argument("analytic: delta out of range");
      const double p = m / base.file_count;
      append_row(csv, {std::to_string(base.user_count), std::to_string(base.file_count),
                       format_value(m), format_value(d),
                       format_value(analytics::symmetric_rate(base.user_count, p, d)),
                       format_value(analytics::completion_time(base.user_count, p, d)),
                       format_value(analytics::completion_time_no_feedback(base.user_count, p, d))});
    }
  return csv;
}

std::string cmd_sweep_fig3(const RunConfig& config) {
  const int K = config.params.user_count;
  const auto p_values = config.p_grid.empty() ? default_grid(0.0, 1.0, 0.05) : config.p_grid;
  const auto d_values =
      config.delta_grid.empty() ? default_grid(0.0, 0.95, 0.05) : config.delta_grid;
  std::string csv = "p,delta,R_sym\n";
  for (double p : p_values)
    for (double d : d_values)
      append_row(csv, {format_value(p), format_value(d),
                       format_value(analytics::symmetric_rate(K, p, d))});
  return csv;
}

std::string cmd_sweep_fig4(const RunConfig& config) {
  const int K = config.params.user_count;
  const int N = config.params.file_count;
  const auto m_values = config.m_grid.empty() ? default_grid(0.0, N, N / 20.0) : config.m_grid;
  const auto d_values =
      config.delta_grid.empty() ? std::vector<double>{0.0, 0.2, 0.6} : config.delta_grid;
  std::string csv = "M,delta,T_fb_per_F,T_nofb_per_F\n";
  for (double d : d_values)
    for (double m : m_values) {
      const double p = m / N;
      append_row(csv, {format_value(m), format_value(d),
                       format_value(analytics::completion_time(K, p, d)),
                       format_value(analytics::completion_time_no_feedback(K, p, d))});
    }
  return csv;
}

std::string cmd_region(const RunConfig& config) {
  if (static_cast<int>(config.rates.size()) != config.params.user_count)
    throw std::invalid_argument("region: need exactly K rates");
  const double p = config.params.cache_fraction();
  const auto result = analytics::is_achievable(config.rates, p, config.params.erasure_prob);
  std::string out;
  out += result.achievable ? "achievable: yes\n" : "achievable: no\n";
  out += "max_weighted_sum: " + format_value(result.max_weighted_sum) + '\n';
  out += "slack: " + format_value(result.slack) + '\n';
  out += "binding_permutation:";
  for (int idx : result.binding_permutation) out += ' ' + std::to_string(idx);
  out += '\n';
  return out;
}

SimulateOutput cmd_simulate(const RunConfig& config) {
  config.params.validate();
  if (config.replicas < 1) throw std::invalid_argument("simulate: replicas must be >= 1");
  if (config.params.cache_quota() < 1 && config.params.memory > 0)
    throw std::invalid_argument("simulate: F too small for the requested M (quota rounds to 0)");

  SimulateOptions opt;
  opt.with_nofb = config.with_nofb;
  opt.verify_decode = config.verify_decode;

  std::vector<ReplicaReport> reports(config.replicas);
  if (config.jobs <= 1) {
    for (int rep = 0; rep < config.replicas; ++rep)
      reports[rep] = run_replica(config.params, rep, opt);
  } else {
    std::atomic<int> next{0};
    std::vector<std::future<void>> workers;
    const int jobs = std::min(config.jobs, config.replicas);
    for (int j = 0; j < jobs; ++j)
      workers.push_back(std::async(std::launch::async, [&] {
        for (int rep = next.fetch_add(1); rep < config.replicas; rep = next.fetch_add(1))
          reports[rep] = run_replica(config.params, rep, opt);
      }));
    for (auto& w : workers) w.get();
  }

  SimulateOutput out;
  out.csv =
      "replica,K,N,M,M_eff,delta,F,T_hat,T_hat_per_F,T_pred_per_F,rel_err,"
      "decode_ok,decode_total,conservation_ok,T_nofb,T_nofb_per_F,T_nofb_pred_per_F\n";

  double mean = 0.0, mean_err = 0.0;
  int decode_ok = 0, decode_total = 0;
  const SystemParams& sp = config.params;
  for (const auto& rep : reports) {
    std::vector<std::string> cells = {
        std::to_string(rep.replica),
        std::to_string(sp.user_count),
        std::to_string(sp.file_count),
        format_value(sp.memory),
        format_value(rep.effective_fraction * sp.file_count),
        format_value(sp.erasure_prob),
        std::to_string(sp.packets_per_file),
        std::to_string(rep.slots),
        format_value(rep.slots_per_packet),
        format_value(rep.predicted_per_packet),
        format_value(rep.relative_error),
        rep.decode_checked ? std::to_string(rep.decode_ok) : std::string{},
        rep.decode_checked ? std::to_string(rep.decode_total) : std::string{},
        rep.conservation_ok ? "1" : "0",
    };
    if (rep.has_nofb) {
      cells.push_back(std::to_string(rep.nofb_slots));
      cells.push_back(format_value(rep.nofb_per_packet));
      cells.push_back(format_value(rep.nofb_predicted_per_packet));
    } else {
      cells.insert(cells.end(), {"", "", ""});
    }
    append_row(out.csv, cells);
    mean += rep.slots_per_packet;
    mean_err += rep.relative_error;
    decode_ok += rep.decode_ok;
    decode_total += rep.decode_total;
  }
  mean /= config.replicas;
  mean_err /= config.replicas;
  double var = 0.0;
  for (const auto& rep : reports) {
    const double d = rep.slots_per_packet - mean;
    var += d * d;
  }
  const double stddev = config.replicas > 1 ? std::sqrt(var / (config.replicas - 1)) : 0.0;

  append_row(out.csv, {"mean", "", "", "", "", "", "", "", format_value(mean), "",
                       format_value(mean_err), "", "", "", "", "", ""});
  append_row(out.csv, {"stddev", "", "", "", "", "", "", "", format_value(stddev), "", "", "", "",
                       "", "", "", ""});

  out.reports = std::move(reports);
  out.decode_fail_rate =
      decode_total == 0 ? 0.0 : 1.0 - static_cast<double>(decode_ok) / decode_total;
  return out;
}

}  // namespace bpec
