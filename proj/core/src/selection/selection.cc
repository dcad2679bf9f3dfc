#include "opms/selection/selection.h"

#include <algorithm>

#include "opms/error.h"
#include "opms/io.h"

namespace opms::selection {

FeatureSet FeatureSet::from_names(std::vector<std::string> names) {
  if (names.empty()) throw Error(ErrorCode::kInvalidArgument, "feature set is empty");
  std::sort(names.begin(), names.end());
  if (std::adjacent_find(names.begin(), names.end()) != names.end()) {
    throw Error(ErrorCode::kInvalidArgument, "feature set has duplicates");
  }
  FeatureSet fs;
  fs.names_ = std::move(names);
  return fs;
}

bool FeatureSet::contains(std::string_view name) const {
  return std::binary_search(names_.begin(), names_.end(), name);
}

FeatureSet select_features(const SelectionPolicy& policy) {
  if (policy.k_per_attack < kMinPerAttack || policy.k_per_attack > kMaxPerAttack) {
    throw Error(ErrorCode::kInvalidArgument, "k_per_attack must be in [1, 3]");
  }
  if (policy.rankings.empty()) throw Error(ErrorCode::kEmptyRanking, "no rankings given");
  std::vector<std::string> chosen;
  for (const auto& [attack, ranking] : policy.rankings) {
    if (ranking.empty()) throw Error(ErrorCode::kEmptyRanking, "ranking for " + attack + " is empty");
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(policy.k_per_attack), ranking.size());
    chosen.insert(chosen.end(), ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  return FeatureSet::from_names(std::move(chosen));
}

namespace {

std::vector<std::size_t> column_indices(const telemetry::FeatureSchema& schema, const FeatureSet& fs) {
  std::vector<std::size_t> cols;
  for (const auto& name : fs.names()) {
    auto idx = schema.index_of(name);
    if (!idx) throw Error(ErrorCode::kUnknownFeature, "feature not in schema: " + name);
    cols.push_back(*idx);
  }
  return cols;
}

RowMatrix gather(const RowMatrix& rows, const std::vector<std::size_t>& cols) {
  RowMatrix out(rows.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out.col(static_cast<Eigen::Index>(c)) = rows.col(static_cast<Eigen::Index>(cols[c]));
  }
  return out;
}

}  // namespace

RowMatrix project_rows(const RowMatrix& rows, const telemetry::FeatureSchema& schema,
                       const FeatureSet& fs) {
  return gather(rows, column_indices(schema, fs));
}

telemetry::Dataset project_dataset(const telemetry::Dataset& ds, const FeatureSet& fs) {
  const auto cols = column_indices(ds.schema(), fs);
  auto schema = telemetry::FeatureSchema::from_names(fs.names());
  std::string provenance = ds.provenance();
  provenance += provenance.empty() ? "" : " ";
  provenance += "projected:" + std::to_string(fs.size());
  return telemetry::Dataset(std::move(schema), gather(ds.features(), cols), ds.labels(),
                            std::move(provenance));
}

nlohmann::json to_json(const FeatureSet& fs) {
  return {{"format_version", kFormatVersion}, {"features", fs.names()}};
}

FeatureSet feature_set_from_json(const nlohmann::json& doc) {
  check_format_version(doc, "feature set");
  try {
    return FeatureSet::from_names(doc.at("features").get<std::vector<std::string>>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("feature set: ") + e.what());
  }
}

}  // namespace opms::selection
