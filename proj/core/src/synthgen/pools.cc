#include "opms/synthgen/pools.h"

#include "opms/error.h"
#include "opms/random.h"

namespace opms::synthgen {

telemetry::Dataset Pools::aggregated() const {
  if (attacks.empty()) throw Error(ErrorCode::kInvalidArgument, "no attack pools");
  telemetry::Dataset out = attacks.front().second;
  for (std::size_t i = 1; i < attacks.size(); ++i) {
    out = telemetry::concat(out, attacks[i].second, "aggregated");
  }
  return out;
}

telemetry::Dataset Pools::attack_pool(std::string_view name) const {
  if (name == kAggregatedName) return aggregated();
  for (const auto& [type, ds] : attacks) {
    if (type.name() == name) return ds;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown attack set: " + std::string(name));
}

std::vector<std::string> Pools::attack_set_names() const {
  std::vector<std::string> names;
  for (const auto& [type, ds] : attacks) names.push_back(type.name());
  names.emplace_back(kAggregatedName);
  return names;
}

Pools generate_pools(const BaselineConfig& baseline, const std::vector<AttackProfile>& profiles,
                     const PoolSizes& sizes, std::uint64_t seed) {
  Pools p;
  const std::uint64_t base = derive_seed(seed, seed_salt::kGenerate);
  p.normal = generate_normal(baseline, sizes.normal, base);
  std::uint64_t k = 1;
  for (const auto& type : telemetry::all_attack_types()) {
    p.attacks.emplace_back(
        type, generate_attack(baseline, find_profile(profiles, type), sizes.attack_per_type,
                              derive_seed(base, k++)));
  }
  return p;
}

}  // namespace opms::synthgen
