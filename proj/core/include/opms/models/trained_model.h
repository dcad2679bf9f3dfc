#ifndef OPMS_MODELS_TRAINED_MODEL_H_
#define OPMS_MODELS_TRAINED_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "opms/models/config.h"
#include "opms/models/gbt.h"
#include "opms/models/neural_net.h"
#include "opms/models/svm.h"
#include "opms/telemetry/dataset.h"

namespace opms::models {

// A fitted binary detector. Immutable; safe to score from several threads.
class TrainedModel {
 public:
  using Impl = std::variant<NeuralNetModel, GbtModel, SvmModel>;

  TrainedModel(Impl impl, telemetry::FeatureSchema schema);

  ModelKind kind() const;
  const telemetry::FeatureSchema& schema() const { return schema_; }
  std::uint64_t schema_fingerprint() const { return schema_.fingerprint(); }
  std::size_t num_features() const { return schema_.size(); }
  const Impl& impl() const { return impl_; }

  // False when the SVM solver stopped at its iteration cap.
  bool converged() const;

  // Attack probability per row, in [0, 1]. Throws SchemaMismatch on a width
  // mismatch and NonFiniteInput on NaN/inf.
  std::vector<double> predict_proba(const RowMatrix& x) const;
  std::vector<double> predict_proba(const telemetry::Dataset& ds) const;

  // Pre-sigmoid score: network output, summed leaf values, or SVM decision
  // value. For the SVM the probability is Platt(margin), not sigmoid(margin).
  std::vector<double> margin(const RowMatrix& x) const;

  // proba >= threshold.
  std::vector<int> predict(const RowMatrix& x, double threshold = 0.5) const;

  // Scoring without validation, for explanation inner loops.
  void predict_proba_unchecked(const RowMatrix& x, std::span<double> out) const;

 private:
  void validate(const RowMatrix& x) const;

  Impl impl_;
  telemetry::FeatureSchema schema_;
};

// Throws SingleClassTraining, NonFiniteInput, InvalidArgument.
TrainedModel fit(const ModelConfig& cfg, const telemetry::Dataset& train,
                 std::uint64_t seed);

std::vector<int> apply_threshold(std::span<const double> proba, double threshold);

nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

}  // namespace opms::models

#endif  // OPMS_MODELS_TRAINED_MODEL_H_
