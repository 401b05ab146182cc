#pragma once

// Random two-layer disease/symptom networks and the batch harness that runs
// CFTP over many (network, seed) cells and aggregates the results.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pgibbs/analysis.hpp"
#include "pgibbs/cftp.hpp"
#include "pgibbs/model.hpp"

namespace pgibbs {

enum class EvidenceMode { ForwardSample, AllOn, None };

std::string to_string(EvidenceMode mode);
EvidenceMode parse_evidence_mode(std::string_view text);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct GeneratorParams {
  std::size_t n_diseases = 10;
  std::size_t n_symptoms = 10;
  double edge_prob = 0.3;
  Range weight_range{0.2, 0.9};
  Range disease_leak_range{0.01, 0.2};
  Range symptom_leak_range{0.0, 0.05};
  EvidenceMode evidence_mode = EvidenceMode::ForwardSample;
};

/// Throws ContractError for counts of zero or ranges outside [0,1].
void check_params(const GeneratorParams& params);

/// Diseases D1..Dn over symptoms S1..Sk. Every disease/symptom edge is drawn
/// independently; deterministic in (params, seed).
Network generate_random_network(const GeneratorParams& params, std::uint64_t seed);

enum class Method { Summary, Explicit };

std::string to_string(Method m);

struct NetworkSource {
  std::string id;
  std::optional<std::string> path;
  std::optional<GeneratorParams> generator;
  std::uint64_t generator_seed = 0;
  /// Generator entries expand to `count` networks named id-0, id-1, ...
  std::size_t count = 1;
};

struct ExperimentConfig {
  std::vector<NetworkSource> networks;
  std::uint64_t seed_base = 0;
  std::size_t seed_count = 100;
  std::int64_t t_max = kDefaultTMax;
  std::vector<Method> methods{Method::Summary, Method::Explicit};
  /// Requires both methods on every network.
  bool compare = false;
  /// Chi-square test of the summary samples against the exact posterior.
  bool exactness = false;
};

/// Relative network paths are resolved against `base_dir`.
ExperimentConfig parse_experiment_config(std::string_view text, const std::string& base_dir = ".");

struct ReportRow {
  std::string network_id;
  std::uint64_t seed = 0;
  Method method = Method::Summary;
  RunStatus status = RunStatus::Indeterminate;
  std::int64_t coalescence_time = 0;
  std::int64_t total_steps = 0;
  /// Not part of the reproducible data.
  double wall_time = 0.0;
};

struct MethodSummary {
  std::string network_id;
  Method method = Method::Summary;
  std::size_t unknowns = 0;
  std::size_t runs = 0;
  std::size_t coalesced = 0;
  double mean_coalescence_time = 0.0;
  /// Mean coalescence time divided by the sweep length.
  double mean_coalescence_sweeps = 0.0;
  double median_coalescence_time = 0.0;
  std::int64_t max_coalescence_time = 0;
  double mean_total_steps = 0.0;
};

struct ExactnessResult {
  std::string network_id;
  std::size_t samples = 0;
  bool impossible_outcome = false;
  ChiSquareResult chi_square;
  std::string note;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<MethodSummary> summaries;
  std::vector<ExactnessResult> exactness;
  /// Cells where the summary chain coalesced from a shallower depth than
  /// explicit tracking (never expected).
  std::size_t dominance_violations = 0;

  bool all_indeterminate() const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

/// Header network_id,seed,method,status,coalescence_time,total_steps; with
/// `with_timing` a trailing wall_time column is appended.
std::string report_csv(const ExperimentReport& report, bool with_timing = false);
std::string report_summary_json(const ExperimentReport& report);

}  // namespace pgibbs
