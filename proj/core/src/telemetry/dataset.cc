#include "opms/telemetry/dataset.h"

#include <cmath>
#include <cstring>

#include "opms/error.h"

namespace opms::telemetry {

std::string_view attack_kind_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::kINB: return "INB";
    case AttackKind::kOOB: return "OOB";
    case AttackKind::kPOL: return "POL";
  }
  return "";
}

std::string_view intensity_name(Intensity intensity) {
  return intensity == Intensity::kLGT ? "LGT" : "STR";
}

std::optional<AttackKind> parse_attack_kind(std::string_view s) {
  for (AttackKind k : {AttackKind::kINB, AttackKind::kOOB, AttackKind::kPOL}) {
    if (attack_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Intensity> parse_intensity(std::string_view s) {
  if (s == "LGT") return Intensity::kLGT;
  if (s == "STR") return Intensity::kSTR;
  return std::nullopt;
}

std::string AttackType::name() const {
  return std::string(attack_kind_name(kind)) + std::string(intensity_name(intensity));
}

std::optional<AttackType> parse_attack_type(std::string_view s) {
  if (s.size() != 6) return std::nullopt;
  auto kind = parse_attack_kind(s.substr(0, 3));
  auto intensity = parse_intensity(s.substr(3));
  if (!kind || !intensity) return std::nullopt;
  return AttackType{*kind, *intensity};
}

const std::vector<AttackType>& all_attack_types() {
  static const std::vector<AttackType> kTypes = {
      {AttackKind::kINB, Intensity::kLGT}, {AttackKind::kINB, Intensity::kSTR},
      {AttackKind::kOOB, Intensity::kLGT}, {AttackKind::kOOB, Intensity::kSTR},
      {AttackKind::kPOL, Intensity::kLGT}, {AttackKind::kPOL, Intensity::kSTR},
  };
  return kTypes;
}

Dataset::Dataset(FeatureSchema schema, RowMatrix rows, std::vector<Label> labels,
                 std::string provenance)
    : schema_(std::move(schema)),
      rows_(std::move(rows)),
      labels_(std::move(labels)),
      provenance_(std::move(provenance)) {
  if (static_cast<std::size_t>(rows_.cols()) != schema_.size() &&
      rows_.rows() > 0) {
    throw Error(ErrorCode::kSchemaMismatch,
                "row width " + std::to_string(rows_.cols()) + " != schema size " +
                    std::to_string(schema_.size()));
  }
  if (rows_.rows() == 0) rows_.resize(0, static_cast<Eigen::Index>(schema_.size()));
  if (static_cast<std::size_t>(rows_.rows()) != labels_.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(labels_.size()) + " labels for " +
                    std::to_string(rows_.rows()) + " rows");
  }
  if (!rows_.allFinite()) {
    throw Error(ErrorCode::kNonFiniteValue, "dataset contains NaN or inf");
  }
}

std::pair<std::size_t, std::size_t> Dataset::class_ratio() const {
  std::size_t attacks = 0;
  for (const auto& l : labels_) attacks += l.is_attack() ? 1 : 0;
  return {labels_.size() - attacks, attacks};
}

std::vector<int> Dataset::binary_labels() const {
  std::vector<int> y;
  y.reserve(labels_.size());
  for (const auto& l : labels_) y.push_back(l.binary());
  return y;
}

Dataset Dataset::subset(std::span<const std::size_t> indices,
                        std::string provenance) const {
  RowMatrix rows(static_cast<Eigen::Index>(indices.size()), rows_.cols());
  std::vector<Label> labels;
  labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    rows.row(static_cast<Eigen::Index>(r)) =
        rows_.row(static_cast<Eigen::Index>(indices[r]));
    labels.push_back(labels_[indices[r]]);
  }
  return Dataset(schema_, std::move(rows), std::move(labels),
                 provenance.empty() ? provenance_ : std::move(provenance));
}

Dataset Dataset::with_features(RowMatrix rows, std::string provenance) const {
  return Dataset(schema_, std::move(rows), labels_,
                 provenance.empty() ? provenance_ : std::move(provenance));
}

bool Dataset::operator==(const Dataset& other) const {
  if (!(schema_ == other.schema_) || labels_ != other.labels_) return false;
  if (rows_.rows() != other.rows_.rows() || rows_.cols() != other.rows_.cols()) {
    return false;
  }
  return rows_.size() == 0 ||
         std::memcmp(rows_.data(), other.rows_.data(),
                     sizeof(double) * static_cast<std::size_t>(rows_.size())) == 0;
}

Dataset concat(const Dataset& a, const Dataset& b, std::string provenance) {
  if (!(a.schema() == b.schema())) {
    throw Error(ErrorCode::kSchemaMismatch, "cannot concatenate different schemas");
  }
  RowMatrix rows(static_cast<Eigen::Index>(a.size() + b.size()),
                 static_cast<Eigen::Index>(a.num_features()));
  rows.topRows(static_cast<Eigen::Index>(a.size())) = a.features();
  rows.bottomRows(static_cast<Eigen::Index>(b.size())) = b.features();
  std::vector<Label> labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  return Dataset(a.schema(), std::move(rows), std::move(labels), std::move(provenance));
}

}  // namespace opms::telemetry
