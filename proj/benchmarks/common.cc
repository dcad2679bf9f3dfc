#include "common.h"

#include <map>

#include "opms/random.h"
#include "opms/synthgen/pools.h"
#include "opms/telemetry/assembly.h"

namespace opms::bench {

const Fixture& fixture() {
  static const Fixture f = [] {
    const auto pools = synthgen::generate_pools(synthgen::default_baseline(),
                                                synthgen::default_profiles(), {}, 11);
    auto ds = telemetry::assemble_imbalanced(pools.normal, pools.aggregated(),
                                             derive_seed(11, seed_salt::kAssembly));
    auto [train, test] = telemetry::stratified_split(ds, 0.3, derive_seed(11, seed_salt::kSplit));
    auto selected = selection::FeatureSet::from_names(
        {"BE-FEC", "BER-FEC", "OPR", "OPR-max", "OPR-min", "OSNR", "OSNR-min", "Q-factor"});
    return Fixture{std::move(train), std::move(test), std::move(selected)};
  }();
  return f;
}

const models::TrainedModel& trained(models::ModelKind kind, bool selected) {
  static std::map<std::pair<models::ModelKind, bool>, models::TrainedModel> cache;
  auto it = cache.find({kind, selected});
  if (it != cache.end()) return it->second;
  const auto& f = fixture();
  const auto train = selected ? selection::project_dataset(f.train, f.selected) : f.train;
  auto model = models::fit(models::default_config(kind), train, 3);
  return cache.emplace(std::pair{kind, selected}, std::move(model)).first->second;
}

}  // namespace opms::bench
