#ifndef OPMS_METRICS_METRICS_H_
#define OPMS_METRICS_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "opms/models/config.h"
#include "opms/telemetry/dataset.h"

namespace opms::metrics {

// Attack is the positive class.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Throws LengthMismatch (including empty input) and NonBinaryLabel.
ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred);

struct TrialMetrics {
  double bac = 0.0;
  double f1 = 0.0;
  double g_mean = 0.0;
};

// Throws EmptyClass when either class has no true samples.
TrialMetrics trial_metrics(const ConfusionCounts& c);

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample stddev; 0 for a single trial
  std::vector<double> trials;

  static MetricSummary from_values(std::vector<double> values);
};

struct MetricReport {
  MetricSummary bac;
  MetricSummary f1;
  MetricSummary g_mean;

  std::size_t n_trials() const { return bac.trials.size(); }
  // Trials in index order.
  static MetricReport from_trials(std::span<const TrialMetrics> trials);
};

MetricReport compute_metrics(const ConfusionCounts& c);

struct TrialExperiment {
  telemetry::Dataset normal;
  telemetry::Dataset attacks;
  models::ModelConfig model;
  double test_fraction = 0.3;
  int n_trials = 100;
  std::size_t jobs = 1;
};

// Trial t draws assembly, split and fit seeds from base_seed + t.
MetricReport run_trials(const TrialExperiment& experiment, std::uint64_t base_seed);

// One trial of the protocol above: assemble, split, fit, score the test split.
TrialMetrics run_trial(const TrialExperiment& experiment, std::uint64_t trial_seed);

nlohmann::json to_json(const MetricSummary& s);
nlohmann::json to_json(const MetricReport& r);
MetricReport metric_report_from_json(const nlohmann::json& doc);

}  // namespace opms::metrics

#endif  // OPMS_METRICS_METRICS_H_
