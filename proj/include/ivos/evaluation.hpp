#pragma once

// Running sessions over datasets, aggregating the curves, and reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ivos/dataset.hpp"

namespace ivos {

inline constexpr std::string_view kToolVersion = "1.0.0";

struct RunConfig {
  Strategy strategy = Strategy::f3;
  int max_clicks = 3;
  int max_rounds = 8;
  int memory_stride = kDefaultMemoryStride;
  BackendOptions backends;
  double min_region_area = 0.001;         // fraction of the frame area
  std::optional<int> click_radius;        // default: scaled from 5 px at 854x480
  std::optional<int> boundary_tolerance;  // default: round(0.008 * diagonal)
  std::uint64_t seed = 0;
  bool timing = false;
  double time_budget_per_object_seconds = 30.0;

  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct RoundRecord {
  int round = 0;
  int frame_index = 0;
  int clicks = 0;
  double jf_sum = 0.0;
  double global_jf = 0.0;
  friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct SequenceResult {
  std::string name;
  int frames = 0;
  std::vector<int> objects;
  std::size_t pairs = 0;         // frames x objects
  double initial_jf_sum = 0.0;   // all-background masks, before round 1
  std::vector<RoundRecord> rounds;
  bool early_stop = false;
  std::optional<std::string> error;

  RoundCurve curve() const;
  friend bool operator==(const SequenceResult&, const SequenceResult&) = default;
};

struct SequenceTiming {
  std::string name;
  std::vector<double> seconds;  // one per round record
  double auc_time = 0.0;
  double jf_at_60 = 0.0;
  friend bool operator==(const SequenceTiming&, const SequenceTiming&) = default;
};

// Wall-clock results. Hardware dependent; kept apart from everything else.
struct TimingReport {
  std::vector<SequenceTiming> sequences;
  double mean_auc_time = 0.0;
  double mean_jf_at_60 = 0.0;
  friend bool operator==(const TimingReport&, const TimingReport&) = default;
};

// Published figures of a neural pipeline, carried for comparison only.
struct ReferenceTargets {
  double r_auc = 0.76;
  double auc_jf = 0.83;
  double jf_at_60 = 0.84;
  friend bool operator==(const ReferenceTargets&, const ReferenceTargets&) = default;
};

struct EvaluationReport {
  std::string schema_version{kToolVersion};
  RunConfig config;
  std::vector<SequenceResult> sequences;  // ordered by name
  RoundCurve global_curve;
  double r_auc = 0.0;
  bool partial = false;
  ReferenceTargets reference;
  std::optional<TimingReport> timing;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

// Runs one sequence to completion. Exceptions propagate.
SequenceResult run_sequence(const SequenceDataset& dataset, const RunConfig& config,
                            std::vector<double>* round_seconds = nullptr);

// Global J&F at round r: mean over every (sequence, frame, object) triple,
// each sequence contributing its latest state at or before r.
RoundCurve global_curve(const std::vector<SequenceResult>& sequences);

// Sequences run on `workers` threads; results merge by sequence name, so
// the report does not depend on the worker count. A failing sequence is
// recorded with its error and marks the report partial.
EvaluationReport run_evaluation(const std::vector<SequenceDataset>& datasets,
                                const RunConfig& config, int workers = 1);

enum class ReportFormat { json, csv };

std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(std::string_view text);
std::string report_to_csv(const EvaluationReport& report);

void write_report(const EvaluationReport& report, const std::filesystem::path& path,
                  ReportFormat format);
EvaluationReport read_report(const std::filesystem::path& path);

// Metrics-only mode: predictions and ground truth in the Annotations layout.
struct ScoreResult {
  std::string name;
  double mean_j = 0.0;
  double mean_f = 0.0;
  double mean_jf = 0.0;
  std::size_t pairs = 0;
};

std::vector<ScoreResult> score_sequences(const std::filesystem::path& pred_root,
                                         const std::filesystem::path& gt_root,
                                         const std::vector<std::string>& names,
                                         std::string_view resolution = kDefaultResolution);

}  // namespace ivos
