#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nicdiag/forest.hpp"
#include "nicdiag/telemetry.hpp"
#include "nicdiag/topology.hpp"

namespace nicdiag {

/// Traffic shape of one application analogue: periodic communication
/// bursts over a baseline, with Gaussian jitter.
struct WorkloadProfile {
  std::string name;
  double burst_period_s = 600.0;
  double burst_amplitude = 40000.0;  // packets/min during bursts
  double baseline_rate = 80000.0;    // packets/min
  double noise_std = 3000.0;         // packets/min
  bool supports_f5_f7 = true;        // some traffic shapes never trip these
};

const std::vector<WorkloadProfile>& builtin_profiles();
const WorkloadProfile& profile_by_name(const std::string& name);

/// Generated telemetry for one horizon: cumulative counters sampled once
/// a minute plus sparse operational logs.
struct TelemetryBundle {
  Topology topology;
  std::vector<NicPair> pairs;
  MetricStore metrics;
  std::vector<LogRecord> logs;
  std::int64_t horizon = 3600;     // samples at t = 0, 60, ..., horizon
  std::vector<int> active_pairs;   // pair ids participating in the job
};

struct InjectionSpec {
  int failure_type = 0;  // 0..6 -> F1..F7
  int culprit_pair = 0;
  std::int64_t onset = 0;
  std::int64_t duration = 0;
  double intensity = 8.0;      // symptom multiplier, >= 1
  std::vector<int> job_pairs;  // victims are job minus culprit
};

/// One window of telemetry with per-pair ground-truth labels.
struct LabeledSample {
  std::string id;
  std::string profile;
  std::int64_t window_start = 0;
  std::int64_t window_length = 3600;
  int failure_type = -1;  // -1 for failure-free samples
  int culprit_pair = -1;
  std::vector<StateLabel> labels;  // indexed by pair id
  TelemetryBundle telemetry;
};

/// Round-robins compute NICs over switch ports; (4, 1) gives server1..4 on
/// switch1 ports 100GE/1..4.
Topology generate_cluster(int n_compute, int n_switch, std::uint64_t seed);

/// Baseline counters and logs for every pair. Pairs outside active_pairs
/// (empty means all are active) idle at a fraction of the profile's rate.
TelemetryBundle generate_baseline(const Topology& topology,
                                  const WorkloadProfile& profile,
                                  std::int64_t horizon_s, std::uint64_t seed,
                                  const std::vector<int>& active_pairs = {});

/// Applies one failure's symptom rules to the bundle and labels every pair.
LabeledSample inject_failure(TelemetryBundle bundle, const InjectionSpec& spec,
                             std::uint64_t seed);

/// Failure samples per type followed by failure-free samples, all windows
/// independent and deterministic under seed. Profiles that cannot exhibit
/// F5/F7 get those counts dropped.
std::vector<LabeledSample> generate_corpus(
    const Topology& topology, const WorkloadProfile& profile,
    const std::array<int, kFailureTypeCount>& counts_per_type, int normal_count,
    std::int64_t window_length, std::uint64_t seed);

/// On-disk corpus layout: topology.json, samples.csv, labels.csv and
/// per-sample metrics.csv / logs.tsv under samples/<id>/.
void write_corpus(const std::string& dir, const Topology& topology,
                  const std::vector<LabeledSample>& samples);

struct CorpusSampleRef {
  std::string id;
  std::string profile;
  std::int64_t window_start = 0;
  std::int64_t window_length = 3600;
  int failure_type = -1;
  int culprit_pair = -1;
  std::map<int, StateLabel> labels;
  std::string metrics_path;
  std::string logs_path;
};

struct Corpus {
  std::string dir;
  Topology topology;
  std::vector<NicPair> pairs;
  std::vector<CorpusSampleRef> samples;
};

Corpus read_corpus(const std::string& dir);

/// Per-minute nominal rate of a counter family under this profile; the
/// anchor for symptom visibility and for closed-form traffic checks.
double nominal_rate_per_min(const WorkloadProfile& profile,
                            const std::string& metric);

/// Persistent rate multiplier of one device; pair 0 is exactly 1.0.
double device_rate_factor(int pair_id);

std::vector<std::string> simulated_compute_metrics();
std::vector<std::string> simulated_switch_metrics();

}  // namespace nicdiag
