#ifndef OPMS_EXPLAIN_EXPLANATION_H_
#define OPMS_EXPLAIN_EXPLANATION_H_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opms/explain/kernel_shap.h"
#include "opms/models/trained_model.h"
#include "opms/telemetry/dataset.h"

namespace opms::explain {

// What the attributions add up to.
enum class Target { kProbability, kMargin };
std::string_view target_name(Target t);

enum class Method { kKernelShapExact, kKernelShapSampled, kTreeShap };
std::string_view method_name(Method m);

struct ShapExplanation {
  std::vector<std::string> features;  // schema order
  Target target = Target::kProbability;
  Method method = Method::kTreeShap;
  double base_value = 0.0;
  RowMatrix phi;                // samples x features
  std::vector<double> outputs;  // model output per sample, on the target scale
  std::vector<double> residuals;
  bool regularized = false;
  // Feature indices by descending mean |phi|, ties by schema index.
  std::vector<std::size_t> feature_order;
  std::uint64_t background_fingerprint = 0;

  std::size_t num_samples() const { return static_cast<std::size_t>(phi.rows()); }
  double max_residual() const;
};

struct ExplainOptions {
  KernelShapOptions kernel;
  std::size_t jobs = 1;
};

// Tree SHAP on the margin for boosted trees, Kernel SHAP on the attack
// probability otherwise. Samples are explained independently and returned in
// input order. Throws EmptyBackground, SchemaMismatch, NonFiniteInput.
ShapExplanation explain_model(const models::TrainedModel& model, const RowMatrix& background,
                              const RowMatrix& samples, const ExplainOptions& options = {});

// Like explain_model but insists on tree SHAP. Throws WrongModelKind.
ShapExplanation explain_tree_model(const models::TrainedModel& model,
                                   const RowMatrix& background, const RowMatrix& samples,
                                   std::size_t jobs = 1);

// Up to n rows drawn without replacement; all rows when n >= ds.size().
RowMatrix sample_background(const telemetry::Dataset& ds, std::size_t n, std::uint64_t seed);

std::uint64_t matrix_fingerprint(const RowMatrix& m);

std::vector<std::size_t> order_by_influence(const RowMatrix& phi);

struct RankedFeature {
  std::string name;
  double mean_abs_phi = 0.0;
};

// Most to least influential.
std::vector<RankedFeature> rank_features(const ShapExplanation& expl);

nlohmann::json to_json(const ShapExplanation& expl);
ShapExplanation explanation_from_json(const nlohmann::json& doc);

nlohmann::json ranking_to_json(const std::vector<RankedFeature>& ranking);
std::vector<RankedFeature> ranking_from_json(const nlohmann::json& doc);

}  // namespace opms::explain

#endif  // OPMS_EXPLAIN_EXPLANATION_H_
