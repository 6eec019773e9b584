#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "bpec/channel.hpp"
#include "bpec/experiment.hpp"
#include "bpec/placement.hpp"

namespace {

using json = nlohmann::json;

struct ConfigSources {
  bool k_set = false;
  bool n_set = false;
};

ConfigSources apply_config_file(const std::string& path, bpec::RunConfig& config,
                                const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json j = json::parse(in);

  ConfigSources sources;
  sources.k_set = j.contains("K");
  sources.n_set = j.contains("N");

  // Flags given on the command line win over the config file.
  auto unset = [&](const std::string& flag) { return app.count(flag) == 0; };
  if (j.contains("K") && unset("--K")) config.params.user_count = j["K"].get<int>();
  if (j.contains("N") && unset("--N")) config.params.file_count = j["N"].get<int>();
  if (j.contains("M") && unset("--M")) config.params.memory = j["M"].get<double>();
  if (j.contains("F") && unset("--F")) config.params.packets_per_file = j["F"].get<int>();
  if (j.contains("delta") && unset("--delta")) config.params.erasure_prob = j["delta"].get<double>();
  if (j.contains("P") && unset("--P")) config.params.payload_bytes = j["P"].get<int>();
  if (j.contains("seed") && unset("--seed")) config.params.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("replicas") && unset("--replicas")) config.replicas = j["replicas"].get<int>();
  if (j.contains("jobs") && unset("--jobs")) config.jobs = j["jobs"].get<int>();
  if (j.contains("with_nofb") && unset("--with-nofb")) config.with_nofb = j["with_nofb"].get<bool>();
  if (j.contains("verify_decode") && unset("--verify-decode"))
    config.verify_decode = j["verify_decode"].get<bool>();
  if (j.contains("max_fail") && unset("--max-fail")) config.max_fail = j["max_fail"].get<double>();
  if (j.contains("out") && unset("--out")) config.out = j["out"].get<std::string>();
  if (j.contains("M_grid") && unset("--M-grid")) config.m_grid = j["M_grid"].get<std::vector<double>>();
  if (j.contains("delta_grid") && unset("--delta-grid"))
    config.delta_grid = j["delta_grid"].get<std::vector<double>>();
  if (j.contains("p_grid") && unset("--p-grid")) config.p_grid = j["p_grid"].get<std::vector<double>>();
  if (j.contains("rates") && app.get_subcommand("region")->count("--rates") == 0)
    config.rates = j["rates"].get<std::vector<double>>();
  return sources;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw CLI::ValidationError("--out", "cannot open " + out_path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coded-caching delivery over broadcast erasure channels with state feedback"};
  app.require_subcommand(1);
  app.fallthrough();

  bpec::RunConfig config;
  config.params.user_count = 3;
  config.params.file_count = 3;
  std::string config_path;

  app.add_option("--config", config_path, "JSON config file; flags override its values");
  app.add_option("--K", config.params.user_count, "number of users (2..16)");
  app.add_option("--N", config.params.file_count, "number of files (N >= K)");
  app.add_option("--M", config.params.memory, "per-user cache size in files");
  app.add_option("--F", config.params.packets_per_file, "packets per file");
  app.add_option("--delta", config.params.erasure_prob, "erasure probability in [0,1)");
  app.add_option("--P", config.params.payload_bytes, "payload bytes per packet");
  app.add_option("--seed", config.params.seed, "master RNG seed");
  app.add_option("--replicas", config.replicas, "Monte Carlo replicas");
  app.add_option("--jobs", config.jobs, "parallel replica workers");
  app.add_option("--max-fail", config.max_fail, "tolerated decode failure rate");
  app.add_flag("--with-nofb,!--no-nofb", config.with_nofb,
               "also run the no-feedback baseline on matched channel seeds");
  app.add_flag("--verify-decode,!--no-verify-decode", config.verify_decode,
               "decode every user and check bit-exactness");
  app.add_option("--out", config.out, "output path (default stdout)");
  app.add_option("--M-grid", config.m_grid, "explicit M grid")->delimiter(',');
  app.add_option("--delta-grid", config.delta_grid, "explicit delta grid")->delimiter(',');
  app.add_option("--p-grid", config.p_grid, "explicit M/N grid")->delimiter(',');

  auto* analytic = app.add_subcommand("analytic", "closed-form rate and completion-time table");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo delivery runs vs predictions");
  simulate->add_option("--dump-subfiles", config.dump_subfiles,
                       "write replica-0 placement statistics CSV here");
  simulate->add_option("--dump-transcript", config.dump_transcript,
                       "write replica-0 per-slot transcript log here");
  auto* fig3 = app.add_subcommand("sweep-fig3", "symmetric rate over the (M/N, delta) plane");
  auto* fig4 = app.add_subcommand("sweep-fig4",
                                  "completion time vs memory, with and without feedback");
  auto* region = app.add_subcommand("region", "test a rate point against the achievable region");
  region->add_option("--rates", config.rates, "K comma-separated rates")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigSources sources;
    if (!config_path.empty()) sources = apply_config_file(config_path, config, app);
    sources.k_set = sources.k_set || app.count("--K") > 0;
    sources.n_set = sources.n_set || app.count("--N") > 0;

    if (analytic->parsed()) {
      emit(bpec::cmd_analytic(config), config.out);
    } else if (fig3->parsed()) {
      emit(bpec::cmd_sweep_fig3(config), config.out);
    } else if (fig4->parsed()) {
      if (!sources.k_set) config.params.user_count = 10;
      if (!sources.n_set) config.params.file_count = 100;
      emit(bpec::cmd_sweep_fig4(config), config.out);
    } else if (region->parsed()) {
      emit(bpec::cmd_region(config), config.out);
    } else if (simulate->parsed()) {
      auto result = bpec::cmd_simulate(config);
      emit(result.csv, config.out);
      if (!config.dump_subfiles.empty()) {
        bpec::Rng rng(config.params.seed, bpec::Rng::Stream::placement, 0);
        const auto cache = bpec::place_decentralized(config.params, rng);
        emit(bpec::subfile_stats_csv(bpec::subfile_partition(cache, config.params)),
             config.dump_subfiles);
      }
      if (!config.dump_transcript.empty()) {
        bpec::Rng lib_rng(config.params.seed, bpec::Rng::Stream::library, 0);
        bpec::Rng place_rng(config.params.seed, bpec::Rng::Stream::placement, 0);
        const auto library = bpec::generate_library(config.params, lib_rng);
        const auto cache = bpec::place_decentralized(config.params, place_rng);
        const auto subfiles = bpec::subfile_partition(cache, config.params);
        std::vector<int> demands(config.params.user_count);
        for (int k = 0; k < config.params.user_count; ++k) demands[k] = k;
        bpec::ErasureChannel channel(config.params.user_count, config.params.erasure_prob,
                                     bpec::Rng(config.params.seed, bpec::Rng::Stream::channel, 0));
        auto run = bpec::run_delivery(library, subfiles, demands, config.params, channel,
                                      bpec::Rng(config.params.seed, bpec::Rng::Stream::coding, 0));
        emit(bpec::transcript_log(run.transcript), config.dump_transcript);
      }
      if (result.decode_fail_rate > config.max_fail) {
        std::cerr << "decode failure rate " << result.decode_fail_rate << " exceeds "
                  << config.max_fail << "\n";
        return 2;
      }
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
