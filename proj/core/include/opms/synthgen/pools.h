#ifndef OPMS_SYNTHGEN_POOLS_H_
#define OPMS_SYNTHGEN_POOLS_H_

#include <string>
#include <utility>
#include <vector>

#include "opms/synthgen/generator.h"

namespace opms::synthgen {

inline constexpr std::string_view kAggregatedName = "aggregated";

// Row pools the trial protocol draws from.
struct Pools {
  telemetry::Dataset normal;
  std::vector<std::pair<AttackType, telemetry::Dataset>> attacks;  // all_attack_types() order

  // Concatenation of every attack pool.
  telemetry::Dataset aggregated() const;
  // Attack type name or kAggregatedName. Throws InvalidArgument.
  telemetry::Dataset attack_pool(std::string_view name) const;
  // The six type names followed by kAggregatedName.
  std::vector<std::string> attack_set_names() const;
};

struct PoolSizes {
  std::size_t normal = 400;
  std::size_t attack_per_type = 400;
};

Pools generate_pools(const BaselineConfig& baseline, const std::vector<AttackProfile>& profiles,
                     const PoolSizes& sizes, std::uint64_t seed);

}  // namespace opms::synthgen

#endif  // OPMS_SYNTHGEN_POOLS_H_
