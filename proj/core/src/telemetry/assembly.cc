#include "opms/telemetry/assembly.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "opms/error.h"
#include "opms/random.h"

namespace opms::telemetry {

Dataset assemble_imbalanced(const Dataset& normal, const Dataset& attacks,
                            std::uint64_t seed) {
  if (!(normal.schema() == attacks.schema())) {
    throw Error(ErrorCode::kSchemaMismatch, "normal and attack schemas differ");
  }
  const std::size_t needed = imbalanced_attack_count(normal.size());
  if (attacks.size() < needed) {
    throw Error(ErrorCode::kInsufficientAttackRows,
                "need " + std::to_string(needed) + " attack rows, have " +
                    std::to_string(attacks.size()));
  }
  Rng rng(derive_seed(seed, seed_salt::kAssembly));
  std::vector<std::size_t> picked = seeded_permutation(attacks.size(), rng);
  picked.resize(needed);

  Dataset pool = concat(normal, attacks.subset(picked));
  std::vector<std::size_t> order = seeded_permutation(pool.size(), rng);
  return pool.subset(order, "assembled(seed=" + std::to_string(seed) + ")");
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds,
                                             double test_fraction,
                                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test_fraction must be in (0,1)");
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    by_class[ds.labels()[i].binary()].push_back(i);
  }
  Rng rng(derive_seed(seed, seed_salt::kSplit));
  std::vector<bool> in_test(ds.size(), false);
  for (auto& members : by_class) {
    const std::size_t n = members.size();
    if (n < 2) {
      throw Error(ErrorCode::kDegenerateClass,
                  "class with " + std::to_string(n) + " samples cannot be split");
    }
    auto n_test = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t k = 0; k < n_test; ++k) in_test[members[k]] = true;
  }
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (in_test[i] ? test_idx : train_idx).push_back(i);
  }
  return {ds.subset(train_idx, ds.provenance() + "/train"),
          ds.subset(test_idx, ds.provenance() + "/test")};
}

}  // namespace opms::telemetry
