#ifndef OPMS_TELEMETRY_DATASET_H_
#define OPMS_TELEMETRY_DATASET_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "opms/telemetry/schema.h"

namespace opms {

// Feature matrices are row-major: one row per sample.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace opms

namespace opms::telemetry {

enum class AttackKind { kINB, kOOB, kPOL };
enum class Intensity { kLGT, kSTR };

std::string_view attack_kind_name(AttackKind kind);
std::string_view intensity_name(Intensity intensity);
std::optional<AttackKind> parse_attack_kind(std::string_view s);
std::optional<Intensity> parse_intensity(std::string_view s);

// One attack scenario, e.g. INBSTR.
struct AttackType {
  AttackKind kind;
  Intensity intensity;

  std::string name() const;
  bool operator==(const AttackType&) const = default;
};

std::optional<AttackType> parse_attack_type(std::string_view s);

// INBLGT, INBSTR, OOBLGT, OOBSTR, POLLGT, POLSTR.
const std::vector<AttackType>& all_attack_types();

enum class LabelClass { kNormal, kAttack };

class Label {
 public:
  static Label normal() { return Label(); }
  static Label attack(AttackType type) { return Label(type); }

  LabelClass label_class() const {
    return type_ ? LabelClass::kAttack : LabelClass::kNormal;
  }
  bool is_attack() const { return type_.has_value(); }
  // Present iff the sample is an attack.
  const std::optional<AttackType>& attack_type() const { return type_; }
  // 1 for Attack, 0 for Normal.
  int binary() const { return is_attack() ? 1 : 0; }

  bool operator==(const Label&) const = default;

 private:
  Label() = default;
  explicit Label(AttackType type) : type_(type) {}
  std::optional<AttackType> type_;
};

// Labeled OPM samples. Immutable after construction; safe to share
// read-only across threads.
class Dataset {
 public:
  Dataset() = default;
  // Throws SchemaMismatch if the column count differs from the schema,
  // LengthMismatch if label and row counts differ, NonFiniteValue on NaN/inf.
  Dataset(FeatureSchema schema, RowMatrix rows, std::vector<Label> labels,
          std::string provenance = {});

  const FeatureSchema& schema() const { return schema_; }
  const RowMatrix& features() const { return rows_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::string& provenance() const { return provenance_; }

  std::size_t size() const { return labels_.size(); }
  std::size_t num_features() const { return schema_.size(); }
  std::span<const double> row(std::size_t i) const {
    return {rows_.row(static_cast<Eigen::Index>(i)).data(), num_features()};
  }

  // (normal_count, attack_count)
  std::pair<std::size_t, std::size_t> class_ratio() const;

  std::vector<int> binary_labels() const;

  // Rows in the given order.
  Dataset subset(std::span<const std::size_t> indices,
                 std::string provenance = {}) const;

  // Same schema, same labels, replaced feature values.
  Dataset with_features(RowMatrix rows, std::string provenance = {}) const;

  // Exact equality: schema, labels and bitwise feature values.
  bool operator==(const Dataset& other) const;

 private:
  FeatureSchema schema_;
  RowMatrix rows_;
  std::vector<Label> labels_;
  std::string provenance_;
};

// Row-wise concatenation; schemas must match.
Dataset concat(const Dataset& a, const Dataset& b, std::string provenance = {});

}  // namespace opms::telemetry

#endif  // OPMS_TELEMETRY_DATASET_H_
