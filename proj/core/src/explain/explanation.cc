#include "opms/explain/explanation.h"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "opms/error.h"
#include "opms/explain/tree_shap.h"
#include "opms/io.h"
#include "opms/parallel.h"
#include "opms/random.h"

namespace opms::explain {

std::string_view target_name(Target t) {
  return t == Target::kMargin ? "margin" : "probability";
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kKernelShapExact: return "kernel_shap_exact";
    case Method::kKernelShapSampled: return "kernel_shap_sampled";
    case Method::kTreeShap: return "tree_shap";
  }
  return "unknown";
}

double ShapExplanation::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

std::uint64_t matrix_fingerprint(const RowMatrix& m) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  const std::int64_t shape[2] = {m.rows(), m.cols()};
  mix(shape, sizeof(shape));
  mix(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  return h;
}

std::vector<std::size_t> order_by_influence(const RowMatrix& phi) {
  Eigen::VectorXd mean_abs = phi.cwiseAbs().colwise().mean().transpose();
  std::vector<std::size_t> order(static_cast<std::size_t>(phi.cols()));
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mean_abs(static_cast<Eigen::Index>(a)) > mean_abs(static_cast<Eigen::Index>(b));
  });
  return order;
}

RowMatrix sample_background(const telemetry::Dataset& ds, std::size_t n, std::uint64_t seed) {
  if (ds.size() == 0) throw Error(ErrorCode::kEmptyBackground, "no rows to draw background from");
  if (n >= ds.size()) return ds.features();
  Rng rng(derive_seed(seed, seed_salt::kBackground));
  auto perm = seeded_permutation(ds.size(), rng);
  perm.resize(n);
  std::sort(perm.begin(), perm.end());
  RowMatrix out(static_cast<Eigen::Index>(n), ds.features().cols());
  for (std::size_t i = 0; i < n; ++i) {
    out.row(static_cast<Eigen::Index>(i)) = ds.features().row(static_cast<Eigen::Index>(perm[i]));
  }
  return out;
}

namespace {

ShapExplanation start(const models::TrainedModel& model, const RowMatrix& background,
                      const RowMatrix& samples) {
  if (background.rows() == 0) throw Error(ErrorCode::kEmptyBackground, "background set is empty");
  const auto d = static_cast<Eigen::Index>(model.num_features());
  if (background.cols() != d || samples.cols() != d) {
    throw Error(ErrorCode::kSchemaMismatch, "explanation inputs do not match model width");
  }
  if (!samples.allFinite() || !background.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "explanation inputs contain NaN or inf");
  }
  ShapExplanation e;
  e.features = model.schema().names();
  e.phi = RowMatrix::Zero(samples.rows(), d);
  e.outputs.assign(static_cast<std::size_t>(samples.rows()), 0.0);
  e.residuals.assign(e.outputs.size(), 0.0);
  e.background_fingerprint = matrix_fingerprint(background);
  return e;
}

void finish(ShapExplanation& e) {
  e.feature_order = order_by_influence(e.phi);
}

}  // namespace

ShapExplanation explain_tree_model(const models::TrainedModel& model, const RowMatrix& background,
                                   const RowMatrix& samples, std::size_t jobs) {
  const auto* gbt = std::get_if<models::GbtModel>(&model.impl());
  if (gbt == nullptr) {
    throw Error(ErrorCode::kWrongModelKind, "tree SHAP needs a gradient-boosted tree model");
  }
  ShapExplanation e = start(model, background, samples);
  e.target = Target::kMargin;
  e.method = Method::kTreeShap;
  const auto d = static_cast<std::size_t>(samples.cols());
  std::vector<double> bases(e.outputs.size(), 0.0);
  parallel_for(e.outputs.size(), jobs, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    auto res = tree_shap(*gbt, background, {samples.row(r).data(), d});
    std::copy(res.phi.begin(), res.phi.end(), e.phi.row(r).data());
    e.outputs[i] = res.output;
    bases[i] = res.base_value;
    e.residuals[i] = std::abs(res.base_value + e.phi.row(r).sum() - res.output);
  });
  if (!bases.empty()) {
    e.base_value = bases[0];
  } else {
    double sum = 0.0;
    for (Eigen::Index b = 0; b < background.rows(); ++b) {
      sum += gbt->margin({background.row(b).data(), d});
    }
    e.base_value = sum / static_cast<double>(background.rows());
  }
  finish(e);
  return e;
}

ShapExplanation explain_model(const models::TrainedModel& model, const RowMatrix& background,
                              const RowMatrix& samples, const ExplainOptions& options) {
  if (model.kind() == models::ModelKind::kGradientBoostedTrees) {
    return explain_tree_model(model, background, samples, options.jobs);
  }
  ShapExplanation e = start(model, background, samples);
  e.target = Target::kProbability;
  BatchScorer score = [&model](const RowMatrix& rows, std::span<double> out) {
    model.predict_proba_unchecked(rows, out);
  };
  const auto d = static_cast<std::size_t>(samples.cols());
  std::vector<char> regularized(e.outputs.size(), 0);
  std::vector<char> exact(e.outputs.size(), 1);
  std::vector<double> bases(e.outputs.size(), 0.0);
  parallel_for(e.outputs.size(), options.jobs, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i);
    KernelShapOptions opt = options.kernel;
    opt.seed = options.kernel.seed + i;
    auto res = kernel_shap(score, background, {samples.row(r).data(), d}, opt);
    std::copy(res.phi.begin(), res.phi.end(), e.phi.row(r).data());
    e.outputs[i] = res.output;
    e.residuals[i] = res.residual;
    bases[i] = res.base_value;
    regularized[i] = res.regularized;
    exact[i] = res.exact;
  });
  if (!bases.empty()) e.base_value = bases[0];
  e.regularized = std::any_of(regularized.begin(), regularized.end(), [](char c) { return c; });
  const bool all_exact = std::all_of(exact.begin(), exact.end(), [](char c) { return c; });
  e.method = all_exact ? Method::kKernelShapExact : Method::kKernelShapSampled;
  finish(e);
  return e;
}

std::vector<RankedFeature> rank_features(const ShapExplanation& expl) {
  if (expl.phi.rows() == 0) return {};
  Eigen::VectorXd mean_abs = expl.phi.cwiseAbs().colwise().mean().transpose();
  std::vector<RankedFeature> out;
  for (std::size_t j : order_by_influence(expl.phi)) {
    out.push_back({expl.features[j], mean_abs(static_cast<Eigen::Index>(j))});
  }
  return out;
}

nlohmann::json to_json(const ShapExplanation& e) {
  nlohmann::json phi = nlohmann::json::array();
  for (Eigen::Index i = 0; i < e.phi.rows(); ++i) {
    phi.push_back(std::vector<double>(e.phi.row(i).data(), e.phi.row(i).data() + e.phi.cols()));
  }
  std::vector<std::string> order;
  for (std::size_t j : e.feature_order) order.push_back(e.features[j]);
  return {{"format_version", kFormatVersion},
          {"method", std::string(method_name(e.method))},
          {"target", std::string(target_name(e.target))},
          {"base_value", e.base_value},
          {"features", e.features},
          {"feature_order", order},
          {"phi", phi},
          {"outputs", e.outputs},
          {"residuals", e.residuals},
          {"regularized", e.regularized},
          {"background_fingerprint", e.background_fingerprint}};
}

ShapExplanation explanation_from_json(const nlohmann::json& doc) {
  check_format_version(doc, "explanation");
  try {
    ShapExplanation e;
    e.features = doc.at("features").get<std::vector<std::string>>();
    const std::string target = doc.at("target").get<std::string>();
    e.target = target == "margin" ? Target::kMargin : Target::kProbability;
    const std::string method = doc.at("method").get<std::string>();
    e.method = method == "tree_shap"             ? Method::kTreeShap
               : method == "kernel_shap_exact"   ? Method::kKernelShapExact
                                                 : Method::kKernelShapSampled;
    e.base_value = doc.at("base_value").get<double>();
    auto rows = doc.at("phi").get<std::vector<std::vector<double>>>();
    e.phi.resize(static_cast<Eigen::Index>(rows.size()),
                 static_cast<Eigen::Index>(e.features.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != e.features.size()) {
        throw Error(ErrorCode::kFormatError, "phi row width mismatch");
      }
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        e.phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    e.outputs = doc.at("outputs").get<std::vector<double>>();
    e.residuals = doc.value("residuals", std::vector<double>(e.outputs.size(), 0.0));
    e.regularized = doc.value("regularized", false);
    e.background_fingerprint = doc.value("background_fingerprint", std::uint64_t{0});
    if (e.outputs.size() != rows.size()) {
      throw Error(ErrorCode::kFormatError, "outputs and phi rows differ in count");
    }
    e.feature_order = order_by_influence(e.phi);
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kFormatError, std::string("explanation: ") + ex.what());
  }
}

nlohmann::json ranking_to_json(const std::vector<RankedFeature>& ranking) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& r : ranking) items.push_back({{"feature", r.name}, {"mean_abs_phi", r.mean_abs_phi}});
  return {{"format_version", kFormatVersion}, {"ranking", items}};
}

std::vector<RankedFeature> ranking_from_json(const nlohmann::json& doc) {
  check_format_version(doc, "ranking");
  try {
    std::vector<RankedFeature> out;
    for (const auto& item : doc.at("ranking")) {
      out.push_back({item.at("feature").get<std::string>(), item.at("mean_abs_phi").get<double>()});
    }
    return out;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kFormatError, std::string("ranking: ") + ex.what());
  }
}

}  // namespace opms::explain
