#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bpec/analytics.hpp"
#include "bpec/channel.hpp"
#include "bpec/delivery.hpp"
#include "bpec/experiment.hpp"
#include "bpec/gf256.hpp"
#include "bpec/placement.hpp"

namespace py = pybind11;
using namespace bpec;

namespace {

SystemParams make_params(int K, int N, double M, int F, double delta, int P,
                         std::uint64_t seed) {
  SystemParams params;
  params.user_count = K;
  params.file_count = N;
  params.memory = M;
  params.packets_per_file = F;
  params.erasure_prob = delta;
  params.payload_bytes = P;
  params.seed = seed;
  params.validate();
  return params;
}

py::dict report_to_dict(const ReplicaReport& rep) {
  py::dict d;
  d["replica"] = rep.replica;
  d["effective_fraction"] = rep.effective_fraction;
  d["slots"] = rep.slots;
  d["slots_per_packet"] = rep.slots_per_packet;
  d["predicted_per_packet"] = rep.predicted_per_packet;
  d["relative_error"] = rep.relative_error;
  d["decode_checked"] = rep.decode_checked;
  d["decode_ok"] = rep.decode_ok;
  d["decode_total"] = rep.decode_total;
  d["conservation_ok"] = rep.conservation_ok;
  py::list lengths;
  for (const auto& entry : rep.subphase_lengths)
    lengths.append(py::make_tuple(entry.subphase, entry.slots));
  d["subphase_lengths"] = lengths;
  if (rep.has_nofb) {
    d["nofb_slots"] = rep.nofb_slots;
    d["nofb_per_packet"] = rep.nofb_per_packet;
    d["nofb_predicted_per_packet"] = rep.nofb_predicted_per_packet;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Coded caching over broadcast erasure channels with state feedback";

  m.def("symmetric_rate", &analytics::symmetric_rate, py::arg("K"), py::arg("p"),
        py::arg("delta"), "Per-user symmetric rate on the region boundary.");
  m.def("completion_time", &analytics::completion_time, py::arg("K"), py::arg("p"),
        py::arg("delta"), "Delivery slots per packet of file size, with feedback.");
  m.def("completion_time_no_feedback", &analytics::completion_time_no_feedback, py::arg("K"),
        py::arg("p"), py::arg("delta"));
  m.def("order_rate_bound", &analytics::order_rate_bound, py::arg("K"), py::arg("i"),
        py::arg("delta"));
  m.def("order1_rate_composed", &analytics::order1_rate_composed, py::arg("K"), py::arg("delta"));
  m.def("cache_rate_composed", &analytics::cache_rate_composed, py::arg("K"), py::arg("p"),
        py::arg("delta"));
  m.def("upgrade_prob", &analytics::upgrade_prob, py::arg("K"), py::arg("delta"), py::arg("i"),
        py::arg("j"));
  m.def("consume_prob", &analytics::consume_prob, py::arg("K"), py::arg("delta"), py::arg("j"));
  m.def("length_decomposition_residual", &analytics::length_decomposition_residual, py::arg("K"),
        py::arg("delta"), py::arg("n1"));

  py::class_<analytics::PhasePlan>(m, "PhasePlan")
      .def_readonly("user_count", &analytics::PhasePlan::user_count)
      .def_readonly("n0", &analytics::PhasePlan::n0)
      .def_readonly("cache_counts", &analytics::PhasePlan::cache_counts)
      .def_readonly("upgrade_counts", &analytics::PhasePlan::upgrade_counts)
      .def_readonly("subphase_len", &analytics::PhasePlan::subphase_len)
      .def("total_slots", &analytics::PhasePlan::total_slots);
  m.def("phase_plan", &analytics::phase_plan, py::arg("K"), py::arg("delta"), py::arg("p"),
        py::arg("F"));

  m.def(
      "is_achievable",
      [](const std::vector<double>& rates, double p, double delta) {
        const auto result = analytics::is_achievable(rates, p, delta);
        return py::make_tuple(result.achievable, result.binding_permutation, result.slack);
      },
      py::arg("rates"), py::arg("p"), py::arg("delta"),
      "Returns (achievable, binding_permutation, slack).");

  m.def("gf_add", [](int a, int b) { return int(gf::add(a & 0xff, b & 0xff)); });
  m.def("gf_mul", [](int a, int b) { return int(gf::mul(a & 0xff, b & 0xff)); });
  m.def("gf_inv", [](int a) { return int(gf::inv(a & 0xff)); });
  m.def(
      "gf_combine",
      [](const std::vector<Payload>& payloads, const std::vector<int>& coeffs) {
        std::vector<std::uint8_t> c(coeffs.begin(), coeffs.end());
        return gf::combine(payloads, c);
      },
      py::arg("payloads"), py::arg("coeffs"));
  m.def(
      "gf_solve",
      [](const std::vector<std::vector<int>>& matrix, const std::vector<Payload>& rhs) {
        std::vector<gf::LinearRow> rows;
        for (std::size_t i = 0; i < matrix.size(); ++i) {
          gf::LinearRow row;
          row.coeffs.assign(matrix[i].begin(), matrix[i].end());
          row.rhs = rhs[i];
          rows.push_back(std::move(row));
        }
        const std::size_t unknowns = matrix.empty() ? 0 : matrix.front().size();
        auto solution = gf::solve_linear_system(std::move(rows), unknowns);
        return solution ? py::cast(*solution) : py::object(py::none());
      },
      py::arg("matrix"), py::arg("rhs"),
      "Solves the system over GF(256); None when rank deficient.");

  m.def(
      "subfile_fractions",
      [](int K, int N, double M, int F, std::uint64_t seed) {
        const auto params = make_params(K, N, M, F, 0.0, 1, seed);
        Rng rng(seed, Rng::Stream::placement, 0);
        const auto cache = place_decentralized(params, rng);
        const auto subfiles = subfile_partition(cache, params);
        py::dict out;
        for (UserSet subset = 0; subset < (1u << K); ++subset)
          out[py::int_(subset)] =
              static_cast<double>(subfiles.entry(0, subset).size()) / F;
        return out;
      },
      py::arg("K"), py::arg("N"), py::arg("M"), py::arg("F"), py::arg("seed") = 1,
      "Subset-occupancy fractions of file 0 after one placement draw.");

  m.def(
      "simulate",
      [](int K, int N, double M, int F, double delta, int P, std::uint64_t seed, int replicas,
         bool with_nofb, bool verify_decode) {
        RunConfig config;
        config.params = make_params(K, N, M, F, delta, P, seed);
        config.replicas = replicas;
        config.with_nofb = with_nofb;
        config.verify_decode = verify_decode;
        auto output = cmd_simulate(config);
        py::list reports;
        for (const auto& rep : output.reports) reports.append(report_to_dict(rep));
        return reports;
      },
      py::arg("K"), py::arg("N"), py::arg("M"), py::arg("F"), py::arg("delta"),
      py::arg("P") = 16, py::arg("seed") = 1, py::arg("replicas") = 1,
      py::arg("with_nofb") = false, py::arg("verify_decode") = true,
      "Runs Monte Carlo delivery replicas; returns one dict per replica.");

  m.def(
      "simulate_csv",
      [](int K, int N, double M, int F, double delta, int P, std::uint64_t seed, int replicas,
         bool with_nofb, bool verify_decode) {
        RunConfig config;
        config.params = make_params(K, N, M, F, delta, P, seed);
        config.replicas = replicas;
        config.with_nofb = with_nofb;
        config.verify_decode = verify_decode;
        return cmd_simulate(config).csv;
      },
      py::arg("K"), py::arg("N"), py::arg("M"), py::arg("F"), py::arg("delta"),
      py::arg("P") = 16, py::arg("seed") = 1, py::arg("replicas") = 1,
      py::arg("with_nofb") = false, py::arg("verify_decode") = true);
}
