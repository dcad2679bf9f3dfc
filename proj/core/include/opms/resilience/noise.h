#ifndef OPMS_RESILIENCE_NOISE_H_
#define OPMS_RESILIENCE_NOISE_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "opms/telemetry/dataset.h"

namespace opms::resilience {

struct ColumnRange {
  double lo = 0.0;
  double hi = 0.0;
};

// Per-column [min, max] of a training split.
std::vector<ColumnRange> training_ranges(const telemetry::Dataset& train);

// The whole group of one base parameter is replaced with i.i.d. draws,
// uniform over each column's training range.
struct NoisingSpec {
  telemetry::BaseParam target = telemetry::BaseParam::kQFactor;
  std::uint64_t seed = 0;
};

// Group of the top-ranked feature. Throws EmptyRanking, UnknownFeature.
NoisingSpec pick_noising_target(std::span<const std::string> ranking, std::uint64_t seed);

// Non-target columns are copied bit for bit; constant columns stay constant.
// Throws UnknownGroup when the schema has no column of the target group and
// SchemaMismatch when `ranges` does not match the schema width.
telemetry::Dataset noise_group(const telemetry::Dataset& ds, const NoisingSpec& spec,
                               std::span<const ColumnRange> ranges);

}  // namespace opms::resilience

#endif  // OPMS_RESILIENCE_NOISE_H_
