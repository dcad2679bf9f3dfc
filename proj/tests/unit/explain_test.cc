#include <cmath>

#include <gtest/gtest.h>

#include "opms/explain/explanation.h"
#include "opms/explain/kernel_shap.h"
#include "opms/explain/plot.h"
#include "opms/explain/shapley.h"
#include "opms/explain/tree_shap.h"
#include "opms/models/trained_model.h"
#include "opms/synthgen/pools.h"
#include "opms/telemetry/assembly.h"
#include "test_util.h"

namespace opms::explain {
namespace {

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// A smooth nonlinear scorer with pairwise interactions.
BatchScorer random_scorer(int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd w(m);
  Eigen::MatrixXd q(m, m);
  for (int i = 0; i < m; ++i) {
    w(i) = g(rng);
    for (int j = 0; j < m; ++j) q(i, j) = 0.3 * g(rng);
  }
  return [w, q](const RowMatrix& x, std::span<double> out) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const Eigen::VectorXd v = x.row(r).transpose();
      const double z = w.dot(v) + v.dot(q * v);
      out[static_cast<std::size_t>(r)] = 1.0 / (1.0 + std::exp(-z));
    }
  };
}

TEST(ShapleyTest, GloveGameClosedForm) {
  // Player 0 holds a left glove, players 1 and 2 right gloves.
  const ValueFunction v = [](std::uint32_t s) {
    return (s & 1u) && (s & 6u) ? 1.0 : 0.0;
  };
  const auto phi = exact_shapley(v, 3);
  EXPECT_NEAR(phi[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(phi[1], 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(phi[2], 1.0 / 6.0, 1e-15);
}

TEST(ShapleyTest, AxiomsOnRandomGames) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  const int m = 6;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(1u << m), b(1u << m);
    for (auto& x : a) x = g(rng);
    for (auto& x : b) x = g(rng);
    // Player 5 is a dummy in game a; players 0 and 1 are symmetric.
    for (std::uint32_t s = 0; s < (1u << m); ++s) {
      if (s & 32u) a[s] = a[s & ~32u];
    }
    for (std::uint32_t s = 0; s < (1u << m); ++s) {
      const bool p0 = s & 1u, p1 = s & 2u;
      if (p0 && !p1) a[s] = a[(s & ~1u) | 2u];
    }
    const ValueFunction va = [&](std::uint32_t s) { return a[s]; };
    const ValueFunction vb = [&](std::uint32_t s) { return b[s]; };
    const ValueFunction vab = [&](std::uint32_t s) { return a[s] + b[s]; };
    const auto pa = exact_shapley(va, m), pb = exact_shapley(vb, m), pab = exact_shapley(vab, m);
    double sum = 0.0;
    for (double p : pa) sum += p;
    EXPECT_NEAR(sum, a[(1u << m) - 1] - a[0], 1e-12);
    EXPECT_NEAR(pa[5], 0.0, 1e-12);
    EXPECT_NEAR(pa[0], pa[1], 1e-12);
    for (int j = 0; j < m; ++j) EXPECT_NEAR(pab[static_cast<std::size_t>(j)], pa[static_cast<std::size_t>(j)] + pb[static_cast<std::size_t>(j)], 1e-12);
  }
}

TEST(ShapleyTest, WeightsSumToOneAndLimits) {
  for (int m = 1; m <= 10; ++m) {
    double total = 0.0;
    double binom = 1.0;  // C(m-1, s)
    for (int s = 0; s < m; ++s) {
      total += binom * shapley_weight(m, s);
      binom = binom * (m - 1 - s) / (s + 1);
    }
    EXPECT_NEAR(total, 1.0, 1e-12) << m;
  }
  EXPECT_OPMS_ERROR(exact_shapley([](std::uint32_t) { return 0.0; }, kMaxExactFeatures + 1),
                    ErrorCode::kTooManyFeatures);
}

TEST(KernelShapTest, ExactModeMatchesBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 2 + trial % 11;
    const auto score = random_scorer(m, rng);
    const auto bg = testing::random_matrix(8, m, rng);
    const auto xm = testing::random_matrix(1, m, rng);
    std::span<const double> x(xm.data(), static_cast<std::size_t>(m));
    const auto truth = exact_shapley(interventional_value_function(score, bg, x), m);
    KernelShapOptions opt;
    opt.mode = KernelShapMode::kExact;
    const auto res = kernel_shap(score, bg, x, opt);
    EXPECT_TRUE(res.exact);
    EXPECT_LT(max_abs_diff(res.phi, truth), 1e-9) << "m=" << m;
    EXPECT_LT(res.residual, 1e-9);
    EXPECT_NEAR(res.base_value, coalition_value(score, bg, x, 0), 1e-15);
  }
}

TEST(KernelShapTest, LinearModelClosedForm) {
  std::mt19937_64 rng(2);
  const int m = 15;
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd w(m);
  for (int j = 0; j < m; ++j) w(j) = g(rng);
  const BatchScorer linear = [&](const RowMatrix& x, std::span<double> out) {
    const Eigen::VectorXd s = x * w;
    for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s(i) + 0.5;
  };
  const auto bg = testing::random_matrix(20, m, rng);
  const auto xm = testing::random_matrix(1, m, rng);
  std::span<const double> x(xm.data(), static_cast<std::size_t>(m));
  const Eigen::RowVectorXd mean = bg.colwise().mean();
  KernelShapOptions opt;
  opt.n_coalitions = 300;
  const auto res = kernel_shap(linear, bg, x, opt);
  EXPECT_FALSE(res.exact);
  for (int j = 0; j < m; ++j) {
    EXPECT_NEAR(res.phi[static_cast<std::size_t>(j)], w(j) * (xm(0, j) - mean(j)), 1e-9);
  }
}

TEST(KernelShapTest, SampledModeConvergesAndStaysEfficient) {
  std::mt19937_64 rng(4);
  const int m = 10;
  double err_small = 0.0, err_large = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    const auto score = random_scorer(m, rng);
    const auto bg = testing::random_matrix(10, m, rng);
    const auto xm = testing::random_matrix(1, m, rng);
    std::span<const double> x(xm.data(), static_cast<std::size_t>(m));
    const auto truth = exact_shapley(interventional_value_function(score, bg, x), m);
    KernelShapOptions opt;
    opt.mode = KernelShapMode::kSampled;
    opt.seed = static_cast<std::uint64_t>(trial);
    opt.n_coalitions = 256;
    const auto small = kernel_shap(score, bg, x, opt);
    opt.n_coalitions = 4096;
    const auto large = kernel_shap(score, bg, x, opt);
    EXPECT_LT(small.residual, 1e-3);
    EXPECT_LT(large.residual, 1e-3);
    err_small += max_abs_diff(small.phi, truth);
    err_large += max_abs_diff(large.phi, truth);
    // Same seed, same estimate.
    EXPECT_EQ(kernel_shap(score, bg, x, opt).phi, large.phi);
  }
  EXPECT_LT(err_large, err_small);
}

TEST(KernelShapTest, Errors) {
  std::mt19937_64 rng(1);
  const auto score = random_scorer(3, rng);
  const std::vector<double> x = {0.1, 0.2, 0.3};
  EXPECT_OPMS_ERROR(kernel_shap(score, RowMatrix(0, 3), x), ErrorCode::kEmptyBackground);
  EXPECT_OPMS_ERROR(kernel_shap(score, RowMatrix::Zero(2, 4), x), ErrorCode::kSchemaMismatch);
  const std::vector<double> bad = {0.1, NAN, 0.3};
  EXPECT_OPMS_ERROR(kernel_shap(score, RowMatrix::Zero(2, 3), bad), ErrorCode::kNonFiniteInput);
}

models::GbtModel small_forest(int m, std::mt19937_64& rng, int trees, int depth) {
  const auto x = testing::random_matrix(60, m, rng);
  std::vector<double> y(60);
  for (int i = 0; i < 60; ++i) y[static_cast<std::size_t>(i)] = x(i, 0) + 0.5 * x(i, 1) * x(i, m - 1) > 0 ? 1 : 0;
  models::GbtConfig cfg;
  cfg.n_trees = trees;
  cfg.max_depth = depth;
  cfg.min_child_weight = 0.5;
  return models::train_gbt(x, y, cfg);
}

TEST(TreeShapTest, MatchesBruteForceInterventionalShapley) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 3 + trial % 10;
    const auto forest = small_forest(m, rng, 1 + trial % 3, 1 + trial % 3);
    const BatchScorer margin = [&](const RowMatrix& x, std::span<double> out) {
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        out[static_cast<std::size_t>(i)] = forest.margin({x.row(i).data(), static_cast<std::size_t>(m)});
    };
    const auto bg = testing::random_matrix(6, m, rng);
    const auto xm = testing::random_matrix(1, m, rng);
    std::span<const double> x(xm.data(), static_cast<std::size_t>(m));
    const auto truth = exact_shapley(interventional_value_function(margin, bg, x), m);
    const auto res = tree_shap(forest, bg, x);
    EXPECT_LT(max_abs_diff(res.phi, truth), 1e-9) << "trial " << trial;
    double sum = res.base_value;
    for (double p : res.phi) sum += p;
    EXPECT_NEAR(sum, forest.margin(x), 1e-9);
  }
}

TEST(TreeShapTest, SingleReferenceStump) {
  models::Tree stump;
  stump.nodes.push_back({0, 0.5, 1, 2});
  stump.nodes.push_back({});
  stump.nodes.back().value = -1.0;
  stump.nodes.push_back({});
  stump.nodes.back().value = 3.0;
  const std::vector<double> x = {1.0, 0.0}, z = {0.0, 9.0};
  std::vector<double> phi(2, 0.0);
  tree_shap_single(stump, x, z, phi);
  EXPECT_DOUBLE_EQ(phi[0], 4.0);
  EXPECT_DOUBLE_EQ(phi[1], 0.0);
  EXPECT_OPMS_ERROR(tree_shap(models::GbtModel{{stump}, {}}, RowMatrix(0, 2), x), ErrorCode::kEmptyBackground);
}

struct Fixture {
  telemetry::Dataset train;
  telemetry::Dataset test;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    const auto pools = synthgen::generate_pools(synthgen::default_baseline(),
                                                synthgen::default_profiles(), {200, 40}, 6);
    auto ds = telemetry::assemble_imbalanced(pools.normal, pools.attack_pool("OOBSTR"), 1);
    auto [train, test] = telemetry::stratified_split(ds, 0.3, 2);
    return Fixture{std::move(train), std::move(test)};
  }();
  return f;
}

TEST(ExplainModelTest, LocalAccuracyForEveryModelKind) {
  const auto& f = fixture();
  const auto bg = sample_background(f.train, 10, 1);
  const RowMatrix x = f.test.features().topRows(3);
  for (auto kind : models::kAllModelKinds) {
    auto cfg = models::default_config(kind);
    cfg.neural_net.max_epochs = 20;
    cfg.gbt.n_trees = 15;
    const auto model = models::fit(cfg, f.train, 1);
    ExplainOptions opt;
    opt.kernel.n_coalitions = 512;
    const auto e = explain_model(model, bg, x, opt);
    ASSERT_EQ(e.num_samples(), 3u);
    ASSERT_EQ(e.features.size(), 36u);
    const auto expected = kind == models::ModelKind::kGradientBoostedTrees ? model.margin(x) : model.predict_proba(x);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(e.outputs[i], expected[i], 1e-12);
      const double sum = e.base_value + e.phi.row(static_cast<Eigen::Index>(i)).sum();
      const double tol = e.method == Method::kKernelShapSampled ? 1e-3 : 1e-9;
      EXPECT_NEAR(sum, e.outputs[i], tol) << models::model_kind_name(kind);
      EXPECT_LE(e.residuals[i], tol);
    }
    EXPECT_EQ(e.target, kind == models::ModelKind::kGradientBoostedTrees ? Target::kMargin : Target::kProbability);
    EXPECT_EQ(e.background_fingerprint, matrix_fingerprint(bg));
    if (kind != models::ModelKind::kGradientBoostedTrees) {
      EXPECT_OPMS_ERROR(explain_tree_model(model, bg, x), ErrorCode::kWrongModelKind);
    }
    // Explanations are independent of the worker count.
    opt.jobs = 3;
    EXPECT_EQ(explain_model(model, bg, x, opt).phi, e.phi);
  }
}

TEST(ExplanationTest, RankingOrderAndJson) {
  ShapExplanation e;
  e.features = {"OSNR", "OPR", "CD"};
  e.phi = RowMatrix(2, 3);
  e.phi << 0.1, -0.5, 0.0, -0.3, 0.5, 0.0;
  e.outputs = {0.3, 0.7};
  e.residuals = {0.0, 0.0};
  e.base_value = 0.5;
  e.feature_order = order_by_influence(e.phi);
  EXPECT_EQ(e.feature_order, (std::vector<std::size_t>{1, 0, 2}));
  const auto ranking = rank_features(e);
  ASSERT_EQ(ranking.size(), 3u);
  EXPECT_EQ(ranking[0].name, "OPR");
  EXPECT_DOUBLE_EQ(ranking[0].mean_abs_phi, 0.5);
  EXPECT_DOUBLE_EQ(ranking[1].mean_abs_phi, 0.2);
  const auto back = explanation_from_json(to_json(e));
  EXPECT_EQ(back.phi, e.phi);
  EXPECT_EQ(back.features, e.features);
  const auto r2 = ranking_from_json(ranking_to_json(ranking));
  EXPECT_EQ(r2[2].name, "CD");
}

TEST(ExplanationTest, BackgroundSampling) {
  const auto& f = fixture();
  const auto a = sample_background(f.train, 15, 3);
  EXPECT_EQ(a.rows(), 15);
  EXPECT_EQ(a, sample_background(f.train, 15, 3));
  EXPECT_EQ(sample_background(f.train, 100000, 3).rows(), static_cast<Eigen::Index>(f.train.size()));
}

TEST(DecisionPlotTest, TrajectoriesRunFromBaseToOutput) {
  ShapExplanation e;
  e.features = {"A", "B", "C"};
  e.target = Target::kMargin;
  e.base_value = -1.0;
  e.phi = RowMatrix(2, 3);
  e.phi << 0.5, 2.0, -0.1, -0.2, -0.3, 0.0;
  e.outputs = {1.4, -1.5};
  e.residuals = {0, 0};
  e.feature_order = order_by_influence(e.phi);
  const auto data = decision_plot_data(e, e.outputs, {false});
  ASSERT_EQ(data.features, (std::vector<std::string>{"C", "A", "B"}));
  ASSERT_EQ(data.trajectories.size(), 2u);
  EXPECT_DOUBLE_EQ(data.trajectories[0].front(), -1.0);
  EXPECT_NEAR(data.trajectories[0].back(), 1.4, 1e-12);
  EXPECT_NEAR(data.trajectories[1].back(), -1.5, 1e-12);
  EXPECT_EQ(data.predicted, (std::vector<int>{1, 0}));

  const auto prob = decision_plot_data(e, e.outputs);
  EXPECT_TRUE(prob.sigmoid_applied);
  EXPECT_NEAR(prob.trajectories[0].back(), 1.0 / (1.0 + std::exp(-1.4)), 1e-12);

  const auto csv = decision_plot_csv(data);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sample,predicted,step,feature,value");
  const auto svg = decision_plot_svg(data, "demo");
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("#d62728"), std::string::npos);
  EXPECT_NE(svg.find("#7b3294"), std::string::npos);

  const std::vector<double> one = {1.0};
  EXPECT_OPMS_ERROR(decision_plot_data(e, one), ErrorCode::kMisalignedInputs);
}

}  // namespace
}  // namespace opms::explain
