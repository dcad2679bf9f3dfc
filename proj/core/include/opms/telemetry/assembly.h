#ifndef OPMS_TELEMETRY_ASSEMBLY_H_
#define OPMS_TELEMETRY_ASSEMBLY_H_

#include <cstddef>
#include <cstdint>
#include <utility>

#include "opms/telemetry/dataset.h"

namespace opms::telemetry {

// Attack rows per 100 normal rows in an assembled dataset.
inline constexpr std::size_t kAttacksPerHundredNormal = 15;

// floor(normal_count * 15 / 100)
constexpr std::size_t imbalanced_attack_count(std::size_t normal_count) {
  return normal_count * kAttacksPerHundredNormal / 100;
}

// All rows of `normal` plus exactly imbalanced_attack_count(normal.size())
// rows drawn without replacement from `attacks`, shuffled by `seed`.
// Throws SchemaMismatch or InsufficientAttackRows.
Dataset assemble_imbalanced(const Dataset& normal, const Dataset& attacks,
                            std::uint64_t seed);

// Per-class holdout: round(n_c * test_fraction) rows of each class go to the
// test split (clamped so both splits keep at least one row of every class).
// Rows keep their original relative order. Throws DegenerateClass when a
// class has fewer than two rows.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed);

}  // namespace opms::telemetry

#endif  // OPMS_TELEMETRY_ASSEMBLY_H_
