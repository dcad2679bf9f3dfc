#ifndef OPMS_RESILIENCE_EXPERIMENT_H_
#define OPMS_RESILIENCE_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "opms/explain/explanation.h"
#include "opms/metrics/metrics.h"
#include "opms/models/config.h"
#include "opms/selection/selection.h"
#include "opms/synthgen/pools.h"

namespace opms::resilience {

struct ResilienceConfig {
  std::vector<models::ModelConfig> classifiers = {
      models::default_config(models::ModelKind::kNeuralNet),
      models::default_config(models::ModelKind::kGradientBoostedTrees),
      models::default_config(models::ModelKind::kKernelSvm)};
  int n_trials = 100;
  double test_fraction = 0.3;
  int k_per_attack = 2;
  std::size_t background_size = 100;
  // Test rows explained per ranking, half attack and half normal when possible.
  std::size_t explain_samples = 40;
  int n_coalitions = 2048;
  std::uint64_t base_seed = 0;
  std::size_t jobs = 1;
};

struct ArmResult {
  metrics::MetricReport clean;
  metrics::MetricReport noised;
  metrics::MetricReport control;
  bool target_present = true;   // false: noising was a no-op for this arm
  bool control_present = true;
};

struct CellResult {
  std::string attack_set;
  models::ModelKind classifier = models::ModelKind::kNeuralNet;
  std::vector<explain::RankedFeature> ranking;  // full-feature model, base seed
  telemetry::BaseParam noised_group = telemetry::BaseParam::kQFactor;
  // Least influential continuous group outside the selected set.
  telemetry::BaseParam control_group = telemetry::BaseParam::kLOS;
  ArmResult full;
  ArmResult selected;
};

struct ResilienceReport {
  int n_trials = 0;
  std::uint64_t base_seed = 0;
  int k_per_attack = 2;
  std::vector<std::pair<models::ModelKind, selection::FeatureSet>> feature_sets;
  std::vector<CellResult> cells;

  const selection::FeatureSet& feature_set(models::ModelKind kind) const;
  const CellResult& cell(std::string_view attack_set, models::ModelKind kind) const;
};

// 100 * (clean - noised) / clean
double drop_percent(double clean, double noised);

enum class Metric { kBac, kF1, kGMean };
double metric_mean(const metrics::MetricReport& r, Metric m);

struct ArmDrops {
  double full = 0.0;
  double selected = 0.0;
};

// Mean drop over the cells matching the filters (empty = all).
ArmDrops average_drop(const ResilienceReport& report, Metric m, std::string_view attack_set = {},
                      std::optional<models::ModelKind> classifier = std::nullopt,
                      bool control = false);

// Fits each (attack set, classifier) once at the base seed and ranks features.
struct RankingStudy {
  std::vector<std::string> attack_sets;
  // [attack set][classifier] in config order
  std::vector<std::vector<std::vector<explain::RankedFeature>>> rankings;
};

RankingStudy compute_rankings(const synthgen::Pools& pools, const ResilienceConfig& cfg);

// Test rows to explain: up to n/2 attacks, the rest normal, order preserved.
RowMatrix explanation_rows(const telemetry::Dataset& test, std::size_t n, std::uint64_t seed);

// Union of the top-k features of the six dedicated rankings.
selection::FeatureSet select_for_classifier(const RankingStudy& study, std::size_t classifier_index,
                                            int k_per_attack, models::ModelKind kind);

// Group with the smallest summed mean |phi| among `candidates` (all groups
// when empty) with no column in `exclude`. Throws EmptyRanking.
telemetry::BaseParam least_influential_group(const std::vector<explain::RankedFeature>& ranking,
                                             const selection::FeatureSet& exclude,
                                             std::span<const telemetry::BaseParam> candidates = {});

// Groups whose columns all have at least half their values distinct. Sparse
// counters and indicators are left out: uniform noise over their range moves
// them off the data manifold even when their attributions are near zero.
std::vector<telemetry::BaseParam> continuous_groups(const telemetry::Dataset& ds);

// Trains clean models for every (attack set, classifier, feature set) cell on
// every trial, scores the clean test split, the split with the noised target
// group, and the split with the control group noised.
ResilienceReport run_resilience_experiment(const synthgen::Pools& pools,
                                           const ResilienceConfig& cfg);

nlohmann::json to_json(const ResilienceReport& report);
ResilienceReport resilience_report_from_json(const nlohmann::json& doc);

// attack_set,classifier,arm,metric,clean,noised,drop_percent,control,control_drop_percent
std::string resilience_csv(const ResilienceReport& report);

}  // namespace opms::resilience

#endif  // OPMS_RESILIENCE_EXPERIMENT_H_
