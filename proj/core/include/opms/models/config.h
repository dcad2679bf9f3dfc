#ifndef OPMS_MODELS_CONFIG_H_
#define OPMS_MODELS_CONFIG_H_

#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

namespace opms::models {

enum class ModelKind { kNeuralNet, kGradientBoostedTrees, kKernelSvm };

// CLI names: "mlp", "xgb", "svm".
std::string_view model_kind_name(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);
inline constexpr ModelKind kAllModelKinds[] = {
    ModelKind::kNeuralNet, ModelKind::kGradientBoostedTrees, ModelKind::kKernelSvm};

// Single hidden layer, ReLU, logistic output, Adam on mean cross-entropy.
struct NeuralNetConfig {
  int hidden_units = 100;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int max_epochs = 200;
  int batch_size = 200;
  double l2 = 1e-4;
  // Stop once the epoch loss fails to improve by `tolerance` for
  // `patience` consecutive epochs.
  double tolerance = 1e-4;
  int patience = 10;
};

// Second-order boosting on logistic loss with exact greedy splits.
struct GbtConfig {
  int n_trees = 100;
  int max_depth = 6;
  double learning_rate = 0.3;
  double l2_leaf = 1.0;
  double min_child_weight = 1.0;
};

struct SvmConfig {
  double c = 1.0;
  // Unset: 1 / (n_features * variance of the standardized training matrix).
  std::optional<double> gamma;
  double tolerance = 1e-3;
  // Iteration cap is max_passes * n_train.
  int max_passes = 1000;
};

struct ModelConfig {
  ModelKind kind = ModelKind::kNeuralNet;
  NeuralNetConfig neural_net;
  GbtConfig gbt;
  SvmConfig svm;

  // Throws InvalidArgument on non-positive rates, penalties or sizes.
  void validate() const;
};

ModelConfig default_config(ModelKind kind);

nlohmann::json to_json(const ModelConfig& cfg);
// Missing fields keep their defaults. `kind` may be overridden by the caller.
ModelConfig model_config_from_json(const nlohmann::json& doc);

}  // namespace opms::models

#endif  // OPMS_MODELS_CONFIG_H_
