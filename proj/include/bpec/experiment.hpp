#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpec/delivery.hpp"
#include "bpec/params.hpp"

namespace bpec {

struct RunConfig {
  std::string mode;  // analytic | simulate | sweep-fig3 | sweep-fig4 | region
  SystemParams params;
  int replicas = 1;
  int jobs = 1;
  bool with_nofb = false;
  bool verify_decode = true;
  double max_fail = 0.1;
  std::vector<double> m_grid;      // analytic / sweep-fig4
  std::vector<double> delta_grid;  // analytic / sweeps
  std::vector<double> p_grid;      // sweep-fig3
  std::vector<double> rates;       // region
  std::string out;                 // "" = stdout
  std::string dump_subfiles;       // optional placement statistics CSV
  std::string dump_transcript;     // optional per-slot log of replica 0
};

// Everything measured in one Monte Carlo replica, with the matching analytic
// predictions so downstream consumers never recompute them.
struct ReplicaReport {
  int replica = 0;
  double effective_fraction = 0.0;
  std::uint64_t slots = 0;
  double slots_per_packet = 0.0;      // T_hat / F
  double predicted_per_packet = 0.0;  // completion_time at the effective p
  double relative_error = 0.0;
  bool decode_checked = false;
  int decode_ok = 0;
  int decode_total = 0;
  bool conservation_ok = false;
  std::vector<SubphaseLength> subphase_lengths;

  bool has_nofb = false;
  std::uint64_t nofb_slots = 0;
  double nofb_per_packet = 0.0;
  double nofb_predicted_per_packet = 0.0;
};

struct SimulateOptions {
  bool with_nofb = false;
  bool verify_decode = true;
  bool keep_subphase_lengths = true;
};

// One full replica: seeded library + placement + feedback delivery (+ decode,
// conservation audit, and optionally the matched-seed no-feedback baseline).
ReplicaReport run_replica(const SystemParams& params, int replica, const SimulateOptions& opt);

// Deterministic "%.10g"-style rendering; infinities print as "inf".
std::string format_value(double v);

std::string cmd_analytic(const RunConfig& config);
std::string cmd_sweep_fig3(const RunConfig& config);
std::string cmd_sweep_fig4(const RunConfig& config);
std::string cmd_region(const RunConfig& config);

struct SimulateOutput {
  std::string csv;
  std::vector<ReplicaReport> reports;
  double decode_fail_rate = 0.0;
};

SimulateOutput cmd_simulate(const RunConfig& config);

}  // namespace bpec
