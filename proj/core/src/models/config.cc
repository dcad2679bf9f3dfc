#include "opms/models/config.h"

#include <string>

#include "opms/error.h"
#include "opms/io.h"

namespace opms::models {

std::string_view model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kNeuralNet: return "mlp";
    case ModelKind::kGradientBoostedTrees: return "xgb";
    case ModelKind::kKernelSvm: return "svm";
  }
  return "";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (ModelKind k : kAllModelKinds) {
    if (model_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

void ModelConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  const auto& nn = neural_net;
  require(nn.hidden_units >= 1, "hidden_units must be >= 1");
  require(nn.learning_rate > 0, "learning_rate must be > 0");
  require(nn.beta1 > 0 && nn.beta1 < 1 && nn.beta2 > 0 && nn.beta2 < 1,
          "adam decay rates must be in (0,1)");
  require(nn.epsilon > 0, "epsilon must be > 0");
  require(nn.max_epochs >= 1 && nn.batch_size >= 1, "epochs and batch size must be >= 1");
  require(nn.l2 > 0, "l2 must be > 0");
  require(nn.tolerance > 0 && nn.patience >= 1, "bad stopping rule");
  require(gbt.n_trees >= 1, "n_trees must be >= 1");
  require(gbt.max_depth >= 1, "max_depth must be >= 1");
  require(gbt.learning_rate > 0, "gbt learning_rate must be > 0");
  require(gbt.l2_leaf > 0, "l2_leaf must be > 0");
  require(gbt.min_child_weight > 0, "min_child_weight must be > 0");
  require(svm.c > 0, "C must be > 0");
  require(!svm.gamma || *svm.gamma > 0, "gamma must be > 0");
  require(svm.tolerance > 0, "svm tolerance must be > 0");
  require(svm.max_passes >= 1, "max_passes must be >= 1");
}

ModelConfig default_config(ModelKind kind) {
  ModelConfig cfg;
  cfg.kind = kind;
  return cfg;
}

nlohmann::json to_json(const ModelConfig& cfg) {
  const auto& nn = cfg.neural_net;
  nlohmann::json svm = {{"C", cfg.svm.c},
                        {"tolerance", cfg.svm.tolerance},
                        {"max_passes", cfg.svm.max_passes}};
  svm["gamma"] = cfg.svm.gamma ? nlohmann::json(*cfg.svm.gamma) : nlohmann::json("scale");
  return {{"format_version", kFormatVersion},
          {"kind", std::string(model_kind_name(cfg.kind))},
          {"neural_net",
           {{"hidden_units", nn.hidden_units},
            {"learning_rate", nn.learning_rate},
            {"beta1", nn.beta1},
            {"beta2", nn.beta2},
            {"epsilon", nn.epsilon},
            {"max_epochs", nn.max_epochs},
            {"batch_size", nn.batch_size},
            {"l2", nn.l2},
            {"tolerance", nn.tolerance},
            {"patience", nn.patience}}},
          {"gbt",
           {{"n_trees", cfg.gbt.n_trees},
            {"max_depth", cfg.gbt.max_depth},
            {"learning_rate", cfg.gbt.learning_rate},
            {"l2_leaf", cfg.gbt.l2_leaf},
            {"min_child_weight", cfg.gbt.min_child_weight}}},
          {"svm", svm}};
}

ModelConfig model_config_from_json(const nlohmann::json& doc) {
  ModelConfig cfg;
  try {
    if (doc.contains("format_version")) check_format_version(doc, "model config");
    if (doc.contains("kind")) {
      auto kind = parse_model_kind(doc["kind"].get<std::string>());
      if (!kind) throw Error(ErrorCode::kFormatError, "unknown model kind");
      cfg.kind = *kind;
    }
    if (doc.contains("neural_net")) {
      const auto& j = doc["neural_net"];
      auto& nn = cfg.neural_net;
      nn.hidden_units = j.value("hidden_units", nn.hidden_units);
      nn.learning_rate = j.value("learning_rate", nn.learning_rate);
      nn.beta1 = j.value("beta1", nn.beta1);
      nn.beta2 = j.value("beta2", nn.beta2);
      nn.epsilon = j.value("epsilon", nn.epsilon);
      nn.max_epochs = j.value("max_epochs", nn.max_epochs);
      nn.batch_size = j.value("batch_size", nn.batch_size);
      nn.l2 = j.value("l2", nn.l2);
      nn.tolerance = j.value("tolerance", nn.tolerance);
      nn.patience = j.value("patience", nn.patience);
    }
    if (doc.contains("gbt")) {
      const auto& j = doc["gbt"];
      auto& g = cfg.gbt;
      g.n_trees = j.value("n_trees", g.n_trees);
      g.max_depth = j.value("max_depth", g.max_depth);
      g.learning_rate = j.value("learning_rate", g.learning_rate);
      g.l2_leaf = j.value("l2_leaf", g.l2_leaf);
      g.min_child_weight = j.value("min_child_weight", g.min_child_weight);
    }
    if (doc.contains("svm")) {
      const auto& j = doc["svm"];
      auto& s = cfg.svm;
      s.c = j.value("C", s.c);
      s.tolerance = j.value("tolerance", s.tolerance);
      s.max_passes = j.value("max_passes", s.max_passes);
      if (j.contains("gamma") && j["gamma"].is_number()) s.gamma = j["gamma"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("model config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace opms::models
