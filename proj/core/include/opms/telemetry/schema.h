#ifndef OPMS_TELEMETRY_SCHEMA_H_
#define OPMS_TELEMETRY_SCHEMA_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opms::telemetry {

// Monitored OPM parameters, in catalogue order.
enum class BaseParam {
  kCD,
  kDGD,
  kOSNR,
  kPDL,
  kQFactor,
  kBEFEC,
  kBERFEC,
  kUBEFEC,
  kBERPostFEC,
  kOPR,
  kOPT,
  kOFT,
  kOFR,
  kLOS,
};

inline constexpr std::array<BaseParam, 14> kAllBaseParams = {
    BaseParam::kCD,     BaseParam::kDGD,        BaseParam::kOSNR,
    BaseParam::kPDL,    BaseParam::kQFactor,    BaseParam::kBEFEC,
    BaseParam::kBERFEC, BaseParam::kUBEFEC,     BaseParam::kBERPostFEC,
    BaseParam::kOPR,    BaseParam::kOPT,        BaseParam::kOFT,
    BaseParam::kOFR,    BaseParam::kLOS,
};

enum class Statistic { kAvg, kMax, kMin, kSingle };

std::string_view base_param_name(BaseParam param);
std::optional<BaseParam> parse_base_param(std::string_view name);

// Block-error counters and loss-of-signal are reported once per interval;
// everything else carries avg/max/min.
bool is_single_valued(BaseParam param);

struct FeatureDescriptor {
  BaseParam base;
  Statistic statistic;
  std::string name;

  bool operator==(const FeatureDescriptor&) const = default;
};

// "Q-factor" + kMax -> "Q-factor-max"; kAvg and kSingle carry the bare name.
std::string feature_name(BaseParam base, Statistic statistic);

// Inverse of feature_name. Returns nullopt for names outside the catalogue.
std::optional<FeatureDescriptor> parse_feature_name(std::string_view name);

// Ordered, index-stable catalogue of feature columns.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  // Throws SchemaMismatch on duplicate names.
  explicit FeatureSchema(std::vector<FeatureDescriptor> entries);

  // Builds a schema from column names; throws UnknownFeature for names that
  // do not parse as catalogue features.
  static FeatureSchema from_names(std::span<const std::string> names);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const FeatureDescriptor& operator[](std::size_t i) const {
    return entries_[i];
  }
  const std::vector<FeatureDescriptor>& entries() const { return entries_; }
  std::vector<std::string> names() const;

  std::optional<std::size_t> index_of(std::string_view name) const;

  // Column indices sharing `base`, in schema order. Empty if absent.
  std::vector<std::size_t> group(BaseParam base) const;

  // Distinct base parameters in order of first appearance.
  std::vector<BaseParam> groups() const;

  // FNV-1a over the ordered names; stable across runs and platforms.
  std::uint64_t fingerprint() const;

  bool operator==(const FeatureSchema& other) const {
    return entries_ == other.entries_;
  }

 private:
  std::vector<FeatureDescriptor> entries_;
};

// The 36-column catalogue: 11 parameters x {avg, max, min} plus the three
// single-valued counters, ordered by parameter then avg/max/min.
FeatureSchema build_default_schema();

}  // namespace opms::telemetry

#endif  // OPMS_TELEMETRY_SCHEMA_H_
