#include <cmath>

#include <gtest/gtest.h>

#include "opms/metrics/metrics.h"
#include "opms/synthgen/pools.h"
#include "test_util.h"

namespace opms::metrics {
namespace {

std::vector<int> repeat(int value, int n) { return std::vector<int>(static_cast<std::size_t>(n), value); }

std::vector<int> join(std::initializer_list<std::vector<int>> parts) {
  std::vector<int> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

TEST(MetricsTest, HandDerivedExample) {
  // 15 attacks (10 caught), 100 normal (10 false alarms).
  const auto y_true = join({repeat(1, 15), repeat(0, 100)});
  const auto y_pred = join({repeat(1, 10), repeat(0, 5), repeat(1, 10), repeat(0, 90)});
  const auto c = confusion(y_true, y_pred);
  EXPECT_EQ(c, (ConfusionCounts{10, 10, 90, 5}));
  const auto r = compute_metrics(c);
  // Recall 2/3, specificity 0.9, precision 0.5.
  EXPECT_NEAR(r.bac.mean, (2.0 / 3.0 + 0.9) / 2.0, 1e-12);
  EXPECT_NEAR(r.f1.mean, 2.0 * 0.5 * (2.0 / 3.0) / (0.5 + 2.0 / 3.0), 1e-12);
  EXPECT_NEAR(r.g_mean.mean, std::sqrt(0.6), 1e-12);
  EXPECT_NEAR(r.bac.mean, 0.7833, 1e-4);
  EXPECT_NEAR(r.f1.mean, 0.5714, 1e-4);
  EXPECT_NEAR(r.g_mean.mean, 0.7746, 1e-4);
  EXPECT_EQ(r.n_trials(), 1u);
  EXPECT_EQ(r.bac.std, 0.0);
}

TEST(MetricsTest, GMeanNeverExceedsBalancedAccuracy) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::uint64_t> count(0, 500);
  for (int i = 0; i < 10000; ++i) {
    ConfusionCounts c{count(rng), count(rng), count(rng), count(rng)};
    if (c.tp + c.fn == 0) c.fn = 1;
    if (c.tn + c.fp == 0) c.fp = 1;
    const auto m = trial_metrics(c);
    ASSERT_LE(m.g_mean, m.bac + 1e-15) << c.tp << " " << c.fp << " " << c.tn << " " << c.fn;
    ASSERT_GE(m.bac, 0.0);
    ASSERT_LE(m.bac, 1.0);
    ASSERT_GE(m.f1, 0.0);
    ASSERT_LE(m.f1, 1.0);
  }
}

TEST(MetricsTest, EdgeCasesAndErrors) {
  const auto none_caught = trial_metrics({0, 0, 10, 5});
  EXPECT_EQ(none_caught.f1, 0.0);
  EXPECT_EQ(none_caught.g_mean, 0.0);
  EXPECT_EQ(none_caught.bac, 0.5);
  const auto perfect = trial_metrics({5, 0, 10, 0});
  EXPECT_EQ(perfect.bac, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
  EXPECT_EQ(perfect.g_mean, 1.0);

  const std::vector<int> a = {0, 1}, b = {0}, c = {0, 2}, empty;
  EXPECT_OPMS_ERROR(confusion(a, b), ErrorCode::kLengthMismatch);
  EXPECT_OPMS_ERROR(confusion(empty, empty), ErrorCode::kLengthMismatch);
  EXPECT_OPMS_ERROR(confusion(a, c), ErrorCode::kNonBinaryLabel);
  EXPECT_OPMS_ERROR(trial_metrics({0, 3, 4, 0}), ErrorCode::kEmptyClass);
  EXPECT_OPMS_ERROR(trial_metrics({3, 0, 0, 4}), ErrorCode::kEmptyClass);
}

TEST(MetricsTest, SummaryUsesSampleStd) {
  const auto s = MetricSummary::from_values({1.0, 2.0, 4.0});
  EXPECT_NEAR(s.mean, 7.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.std, std::sqrt(((1 - 7.0 / 3) * (1 - 7.0 / 3) + (2 - 7.0 / 3) * (2 - 7.0 / 3) +
                                (4 - 7.0 / 3) * (4 - 7.0 / 3)) / 2.0),
              1e-15);
  const auto back = metric_report_from_json(to_json(MetricReport{s, s, s}));
  EXPECT_EQ(back.bac.trials, s.trials);
  EXPECT_EQ(back.f1.mean, s.mean);
}

TEST(TrialProtocolTest, DeterministicAcrossJobCounts) {
  const auto pools = synthgen::generate_pools(synthgen::default_baseline(),
                                              synthgen::default_profiles(), {120, 40}, 3);
  auto model = models::default_config(models::ModelKind::kGradientBoostedTrees);
  model.gbt.n_trees = 10;
  TrialExperiment ex{pools.normal, pools.attack_pool("OOBSTR"), model, 0.3, 4, 1};
  const auto serial = run_trials(ex, 17);
  ex.jobs = 3;
  const auto parallel = run_trials(ex, 17);
  EXPECT_EQ(serial.n_trials(), 4u);
  EXPECT_EQ(serial.bac.trials, parallel.bac.trials);
  EXPECT_EQ(serial.f1.trials, parallel.f1.trials);
  for (int t = 0; t < 4; ++t) {
    EXPECT_EQ(run_trial(ex, 17 + static_cast<std::uint64_t>(t)).bac, serial.bac.trials[static_cast<std::size_t>(t)]);
  }
  EXPECT_GT(serial.bac.mean, 0.9);
}

}  // namespace
}  // namespace opms::metrics
