#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nicdiag/evalharness.hpp"

namespace py = pybind11;
using namespace nicdiag;

namespace {

StateProbabilityMatrix to_states(const std::vector<std::vector<double>>& rows) {
  StateProbabilityMatrix s;
  for (const auto& row : rows) {
    if (row.size() != kStateCount) {
      throw ConfigError("state rows need " + std::to_string(kStateCount) +
                        " entries (F1..F7, Victim, Normal)");
    }
    StateProbabilityRow r{};
    std::copy(row.begin(), row.end(), r.begin());
    s.rows.push_back(r);
  }
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "NIC-pair network failure diagnosis primitives";

  m.def(
      "similarity",
      [](const std::vector<int>& a, const std::vector<int>& b) {
        NicPairFeatureVector va, vb;
        for (int s : a) va.symbols.push_back(static_cast<Symbol>(s));
        for (int s : b) vb.symbols.push_back(static_cast<Symbol>(s));
        return similarity(va, vb);
      },
      py::arg("a"), py::arg("b"),
      "Positionwise agreement between two symbol vectors, in [0, 1].");

  m.def(
      "compress",
      [](const std::vector<int>& v, const std::vector<std::vector<int>>& library) {
        NormalSampleLibrary lib;
        for (std::size_t i = 0; i < library.size(); ++i) {
          NicPairFeatureVector s;
          s.pair_id = 0;
          s.window_id = std::to_string(i);
          for (int sym : library[i]) s.symbols.push_back(static_cast<Symbol>(sym));
          lib.append(std::move(s));
        }
        NicPairFeatureVector vec;
        for (int sym : v) vec.symbols.push_back(static_cast<Symbol>(sym));
        const AnomalyVector out = compress(vec, lib);
        return std::vector<int>(out.bits.begin(), out.bits.end());
      },
      py::arg("v"), py::arg("library"),
      "0-1 anomaly vector of v against its nearest library sample.");

  m.def(
      "culprit_mass",
      [](const std::vector<double>& row) {
        if (row.size() != kStateCount) {
          throw ConfigError("state row needs 9 entries");
        }
        StateProbabilityRow r{};
        std::copy(row.begin(), row.end(), r.begin());
        return culprit_mass(r);
      },
      py::arg("row"), "Sum of the seven failure-type probabilities.");

  m.def(
      "build_transition_matrix",
      [](const std::vector<std::vector<double>>& rows) {
        const TransitionMatrix q = build_transition_matrix(to_states(rows));
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < q.n; ++i) out.push_back(q.row(i));
        return out;
      },
      py::arg("states"),
      "Row-stochastic walk matrix from per-pair state probabilities.");

  m.def(
      "random_walk",
      [](const std::vector<std::vector<double>>& rows, int num_results,
         long steps, std::uint64_t seed) {
        WalkConfig config;
        config.num_results = num_results;
        config.steps_per_iteration = steps;
        config.seed = seed;
        const DiagnosisResult r = random_walk(to_states(rows), config);
        std::vector<std::tuple<int, std::string, long>> out;
        for (const RankedCause& c : r.ranked) {
          out.emplace_back(c.pair_id, failure_type_name(c.failure_type),
                           c.visit_count);
        }
        return out;
      },
      py::arg("states"), py::arg("num_results") = 5, py::arg("steps") = 0,
      py::arg("seed") = 0,
      "Ranked (pair, failure type, visits) list from the customized walk.");

  m.def(
      "ac_at_k",
      [](const std::vector<std::tuple<int, int, std::vector<std::pair<int, int>>>>&
             cases,
         int k, const std::string& mode) {
        std::vector<TestCase> cs;
        for (const auto& [pair, type, predicted] : cases) {
          TestCase c;
          c.true_pair = pair;
          c.true_type = type;
          c.predicted = predicted;
          cs.push_back(std::move(c));
        }
        return ac_at_k(cs, k, match_mode_from_string(mode));
      },
      py::arg("cases"), py::arg("k"), py::arg("mode") = "pair-and-type",
      "Top-k accuracy over (true_pair, true_type, predictions) cases.");

  m.def(
      "avg_at_k",
      [](const std::vector<std::tuple<int, int, std::vector<std::pair<int, int>>>>&
             cases,
         int k, const std::string& mode) {
        std::vector<TestCase> cs;
        for (const auto& [pair, type, predicted] : cases) {
          TestCase c;
          c.true_pair = pair;
          c.true_type = type;
          c.predicted = predicted;
          cs.push_back(std::move(c));
        }
        return avg_at_k(cs, k, match_mode_from_string(mode));
      },
      py::arg("cases"), py::arg("k"), py::arg("mode") = "pair-and-type",
      "Mean of ac@1..ac@k.");

  m.def("normalize_slice", &normalize_slice, py::arg("diffs"),
        "Resample counter deltas to 64 points and z-normalize.");

  m.def(
      "level_symbols",
      [](const std::map<std::string, double>& means) {
        std::map<std::string, std::string> out;
        for (const auto& [device, symbol] : level_symbols(means)) {
          out[device] = to_string(symbol);
        }
        return out;
      },
      py::arg("per_device_means"),
      "Boxplot level symbol (VL..VH) per device for one metric.");

  m.def(
      "parse_templates",
      [](const std::vector<std::string>& messages) {
        DrainParser parser;
        std::vector<int> assignment;
        for (const std::string& msg : messages) assignment.push_back(parser.add(msg));
        std::vector<std::string> templates;
        for (const LogTemplate& t : parser.templates()) templates.push_back(t.text());
        return std::make_pair(templates, assignment);
      },
      py::arg("messages"),
      "Mine log templates; returns (templates, per-message template index).");

  m.attr("FAILURE_TYPES") = kFailureTypeCount;
  m.attr("STATES") = kStateCount;
}
