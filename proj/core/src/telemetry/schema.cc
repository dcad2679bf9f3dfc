#include "opms/telemetry/schema.h"

#include <unordered_set>

#include "opms/error.h"

namespace opms::telemetry {

std::string_view base_param_name(BaseParam param) {
  switch (param) {
    case BaseParam::kCD: return "CD";
    case BaseParam::kDGD: return "DGD";
    case BaseParam::kOSNR: return "OSNR";
    case BaseParam::kPDL: return "PDL";
    case BaseParam::kQFactor: return "Q-factor";
    case BaseParam::kBEFEC: return "BE-FEC";
    case BaseParam::kBERFEC: return "BER-FEC";
    case BaseParam::kUBEFEC: return "UBE-FEC";
    case BaseParam::kBERPostFEC: return "BER-POST-FEC";
    case BaseParam::kOPR: return "OPR";
    case BaseParam::kOPT: return "OPT";
    case BaseParam::kOFT: return "OFT";
    case BaseParam::kOFR: return "OFR";
    case BaseParam::kLOS: return "LOS";
  }
  return "";
}

std::optional<BaseParam> parse_base_param(std::string_view name) {
  for (BaseParam p : kAllBaseParams) {
    if (base_param_name(p) == name) return p;
  }
  return std::nullopt;
}

bool is_single_valued(BaseParam param) {
  return param == BaseParam::kBEFEC || param == BaseParam::kUBEFEC ||
         param == BaseParam::kLOS;
}

std::string feature_name(BaseParam base, Statistic statistic) {
  std::string name(base_param_name(base));
  if (statistic == Statistic::kMax) name += "-max";
  if (statistic == Statistic::kMin) name += "-min";
  return name;
}

std::optional<FeatureDescriptor> parse_feature_name(std::string_view name) {
  auto strip = [&](std::string_view suffix) -> std::optional<std::string_view> {
    if (name.size() > suffix.size() &&
        name.substr(name.size() - suffix.size()) == suffix) {
      return name.substr(0, name.size() - suffix.size());
    }
    return std::nullopt;
  };
  for (auto [suffix, stat] : {std::pair{std::string_view("-max"), Statistic::kMax},
                              std::pair{std::string_view("-min"), Statistic::kMin}}) {
    if (auto base_name = strip(suffix)) {
      if (auto base = parse_base_param(*base_name);
          base && !is_single_valued(*base)) {
        return FeatureDescriptor{*base, stat, std::string(name)};
      }
    }
  }
  if (auto base = parse_base_param(name)) {
    return FeatureDescriptor{
        *base, is_single_valued(*base) ? Statistic::kSingle : Statistic::kAvg,
        std::string(name)};
  }
  return std::nullopt;
}

FeatureSchema::FeatureSchema(std::vector<FeatureDescriptor> entries)
    : entries_(std::move(entries)) {
  std::unordered_set<std::string> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.name).second) {
      throw Error(ErrorCode::kSchemaMismatch, "duplicate feature " + e.name);
    }
  }
}

FeatureSchema FeatureSchema::from_names(std::span<const std::string> names) {
  std::vector<FeatureDescriptor> entries;
  entries.reserve(names.size());
  for (const auto& n : names) {
    auto d = parse_feature_name(n);
    if (!d) throw Error(ErrorCode::kUnknownFeature, "unknown feature " + n);
    entries.push_back(std::move(*d));
  }
  return FeatureSchema(std::move(entries));
}

std::vector<std::string> FeatureSchema::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.name);
  return out;
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> FeatureSchema::group(BaseParam base) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].base == base) out.push_back(i);
  }
  return out;
}

std::vector<BaseParam> FeatureSchema::groups() const {
  std::vector<BaseParam> out;
  for (const auto& e : entries_) {
    bool seen = false;
    for (BaseParam b : out) seen = seen || b == e.base;
    if (!seen) out.push_back(e.base);
  }
  return out;
}

std::uint64_t FeatureSchema::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& e : entries_) {
    for (char c : e.name) mix(static_cast<unsigned char>(c));
    mix(0);
  }
  return h;
}

FeatureSchema build_default_schema() {
  std::vector<FeatureDescriptor> entries;
  for (BaseParam p : kAllBaseParams) {
    if (is_single_valued(p)) {
      entries.push_back({p, Statistic::kSingle, feature_name(p, Statistic::kSingle)});
      continue;
    }
    for (Statistic s : {Statistic::kAvg, Statistic::kMax, Statistic::kMin}) {
      entries.push_back({p, s, feature_name(p, s)});
    }
  }
  return FeatureSchema(std::move(entries));
}

}  // namespace opms::telemetry
