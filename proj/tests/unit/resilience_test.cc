#include <gtest/gtest.h>

#include "opms/resilience/experiment.h"
#include "opms/resilience/noise.h"
#include "opms/synthgen/pools.h"
#include "test_util.h"

namespace opms::resilience {
namespace {

using telemetry::BaseParam;

const synthgen::Pools& pools() {
  static const auto p = synthgen::generate_pools(synthgen::default_baseline(),
                                                 synthgen::default_profiles(), {120, 40}, 8);
  return p;
}

TEST(NoiseTest, OnlyTargetGroupChangesAndStaysInRange) {
  const auto& ds = pools().normal;
  const auto ranges = training_ranges(ds);
  ASSERT_EQ(ranges.size(), 36u);
  const NoisingSpec spec{BaseParam::kOSNR, 4};
  const auto noised = noise_group(ds, spec, ranges);
  const auto group = ds.schema().group(BaseParam::kOSNR);
  EXPECT_EQ(noised.labels(), ds.labels());
  for (std::size_t j = 0; j < ds.num_features(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const bool target = std::find(group.begin(), group.end(), j) != group.end();
    if (!target) {
      EXPECT_EQ(noised.features().col(col), ds.features().col(col)) << j;
      continue;
    }
    EXPECT_FALSE(noised.features().col(col) == ds.features().col(col));
    EXPECT_GE(noised.features().col(col).minCoeff(), ranges[j].lo);
    EXPECT_LE(noised.features().col(col).maxCoeff(), ranges[j].hi);
  }
  EXPECT_EQ(noise_group(ds, spec, ranges), noised);
  EXPECT_FALSE(noise_group(ds, {BaseParam::kOSNR, 5}, ranges) == noised);
}

TEST(NoiseTest, ConstantColumnsAndErrors) {
  const auto& ds = pools().normal;
  auto ranges = training_ranges(ds);
  const auto los = ds.schema().group(BaseParam::kLOS)[0];
  ranges[los] = {0.0, 0.0};
  const auto noised = noise_group(ds, {BaseParam::kLOS, 1}, ranges);
  EXPECT_TRUE(noised.features().col(static_cast<Eigen::Index>(los)).isZero());
  const auto small = selection::project_dataset(ds, selection::FeatureSet::from_names({"OSNR", "OPR"}));
  EXPECT_OPMS_ERROR(noise_group(small, {BaseParam::kCD, 1}, training_ranges(small)), ErrorCode::kUnknownGroup);
  EXPECT_OPMS_ERROR(noise_group(small, {BaseParam::kOSNR, 1}, ranges), ErrorCode::kSchemaMismatch);
}

TEST(NoiseTest, TargetIsGroupOfTopFeature) {
  const std::vector<std::string> ranking = {"Q-factor-min", "OSNR"};
  EXPECT_EQ(pick_noising_target(ranking, 3).target, BaseParam::kQFactor);
  EXPECT_EQ(pick_noising_target(ranking, 3).seed, 3u);
  EXPECT_OPMS_ERROR(pick_noising_target({}, 1), ErrorCode::kEmptyRanking);
  const std::vector<std::string> bogus = {"nope"};
  EXPECT_OPMS_ERROR(pick_noising_target(bogus, 1), ErrorCode::kUnknownFeature);
}

TEST(ControlGroupTest, LeastInfluentialEligibleGroup) {
  const std::vector<explain::RankedFeature> ranking = {
      {"OSNR", 0.5}, {"OSNR-min", 0.2}, {"CD", 0.01}, {"CD-max", 0.01}, {"PDL", 0.015}, {"LOS", 0.0}};
  const auto none = selection::FeatureSet::from_names({"OSNR"});
  EXPECT_EQ(least_influential_group(ranking, none), BaseParam::kLOS);
  const std::vector<BaseParam> continuous = {BaseParam::kCD, BaseParam::kPDL, BaseParam::kOSNR};
  // CD sums to 0.02 over its columns, PDL to 0.015.
  EXPECT_EQ(least_influential_group(ranking, none, continuous), BaseParam::kPDL);
  const auto with_pdl = selection::FeatureSet::from_names({"PDL-max"});
  EXPECT_EQ(least_influential_group(ranking, with_pdl, continuous), BaseParam::kCD);
  EXPECT_OPMS_ERROR(least_influential_group({}, none), ErrorCode::kEmptyRanking);
}

TEST(ControlGroupTest, ContinuousGroupsSkipCountersAndIndicators) {
  const auto groups = continuous_groups(pools().normal);
  auto has = [&](BaseParam p) { return std::find(groups.begin(), groups.end(), p) != groups.end(); };
  EXPECT_TRUE(has(BaseParam::kOSNR));
  EXPECT_TRUE(has(BaseParam::kCD));
  EXPECT_FALSE(has(BaseParam::kLOS));
  EXPECT_FALSE(has(BaseParam::kUBEFEC));
}

TEST(ExperimentTest, DropPercentDefinition) {
  EXPECT_DOUBLE_EQ(drop_percent(0.8, 0.6), 25.0);
  EXPECT_DOUBLE_EQ(drop_percent(0.8, 0.8), 0.0);
  EXPECT_DOUBLE_EQ(drop_percent(0.5, 0.6), -20.0);
}

TEST(ExperimentTest, ExplanationRowsAreBalanced) {
  const auto& p = pools();
  const auto ds = concat(p.normal, p.attack_pool("INBSTR"));
  const auto rows = explanation_rows(ds, 20, 1);
  ASSERT_EQ(rows.rows(), 20);
  int attacks = 0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (std::size_t k = 0; k < ds.size(); ++k) {
      if (ds.features().row(static_cast<Eigen::Index>(k)) == rows.row(i)) {
        attacks += ds.labels()[k].is_attack();
        break;
      }
    }
  }
  EXPECT_EQ(attacks, 10);
}

ResilienceConfig tiny_config() {
  ResilienceConfig cfg;
  cfg.classifiers = {models::default_config(models::ModelKind::kGradientBoostedTrees),
                     models::default_config(models::ModelKind::kNeuralNet)};
  cfg.classifiers[0].gbt.n_trees = 10;
  cfg.classifiers[1].neural_net.max_epochs = 15;
  cfg.n_trials = 2;
  cfg.background_size = 10;
  cfg.explain_samples = 6;
  cfg.n_coalitions = 128;
  cfg.base_seed = 4;
  return cfg;
}

TEST(ExperimentTest, SmallRunIsDeterministicAndSerializes) {
  auto cfg = tiny_config();
  const auto a = run_resilience_experiment(pools(), cfg);
  cfg.jobs = 2;
  const auto b = run_resilience_experiment(pools(), cfg);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(resilience_csv(a), resilience_csv(b));

  ASSERT_EQ(a.cells.size(), 7u * 2u);
  ASSERT_EQ(a.feature_sets.size(), 2u);
  for (const auto& c : a.cells) {
    EXPECT_EQ(c.full.clean.n_trials(), 2u);
    EXPECT_FALSE(c.ranking.empty());
    const auto& fs = a.feature_set(c.classifier);
    bool in_selected = false;
    for (const auto& name : fs.names()) {
      in_selected |= telemetry::parse_feature_name(name)->base == c.control_group;
    }
    EXPECT_FALSE(in_selected) << c.attack_set;
  }
  const auto back = resilience_report_from_json(to_json(a));
  EXPECT_EQ(to_json(back).dump(), to_json(a).dump());
  const auto d = average_drop(a, Metric::kBac);
  const auto d_gbt = average_drop(a, Metric::kBac, {}, models::ModelKind::kGradientBoostedTrees);
  const auto d_mlp = average_drop(a, Metric::kBac, {}, models::ModelKind::kNeuralNet);
  EXPECT_NEAR(d.full, (d_gbt.full + d_mlp.full) / 2.0, 1e-12);
}

}  // namespace
}  // namespace opms::resilience
