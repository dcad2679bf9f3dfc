#ifndef OPMS_SELECTION_SELECTION_H_
#define OPMS_SELECTION_SELECTION_H_

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opms/models/config.h"
#include "opms/telemetry/dataset.h"

namespace opms::selection {

inline constexpr int kMinPerAttack = 1;
inline constexpr int kMaxPerAttack = 3;

struct SelectionPolicy {
  int k_per_attack = 2;
  // Attack type name -> feature names, most influential first.
  std::map<std::string, std::vector<std::string>> rankings;
  models::ModelKind classifier = models::ModelKind::kNeuralNet;
};

// Non-empty, duplicate-free, sorted alphabetically.
class FeatureSet {
 public:
  // Sorts; throws InvalidArgument on an empty list or duplicates.
  static FeatureSet from_names(std::vector<std::string> names);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  bool contains(std::string_view name) const;
  bool operator==(const FeatureSet&) const = default;

 private:
  std::vector<std::string> names_;
};

// Union of the top k_per_attack names of every ranking.
// Throws EmptyRanking, InvalidArgument (k outside [1, 3]).
FeatureSet select_features(const SelectionPolicy& policy);

// Columns restricted to `fs`, in fs order. Throws UnknownFeature.
telemetry::Dataset project_dataset(const telemetry::Dataset& ds, const FeatureSet& fs);
RowMatrix project_rows(const RowMatrix& rows, const telemetry::FeatureSchema& schema,
                       const FeatureSet& fs);

nlohmann::json to_json(const FeatureSet& fs);
FeatureSet feature_set_from_json(const nlohmann::json& doc);

}  // namespace opms::selection

#endif  // OPMS_SELECTION_SELECTION_H_
