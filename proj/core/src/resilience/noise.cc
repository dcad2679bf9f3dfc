#include "opms/resilience/noise.h"

#include <algorithm>
#include <random>

#include "opms/error.h"
#include "opms/random.h"

namespace opms::resilience {

std::vector<ColumnRange> training_ranges(const telemetry::Dataset& train) {
  if (train.size() == 0) throw Error(ErrorCode::kInvalidArgument, "empty training split");
  const RowMatrix& x = train.features();
  std::vector<ColumnRange> out(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    out[static_cast<std::size_t>(j)] = {x.col(j).minCoeff(), x.col(j).maxCoeff()};
  }
  return out;
}

NoisingSpec pick_noising_target(std::span<const std::string> ranking, std::uint64_t seed) {
  if (ranking.empty()) throw Error(ErrorCode::kEmptyRanking, "ranking is empty");
  auto desc = telemetry::parse_feature_name(ranking.front());
  if (!desc) throw Error(ErrorCode::kUnknownFeature, "not a catalogue feature: " + ranking.front());
  return {desc->base, seed};
}

telemetry::Dataset noise_group(const telemetry::Dataset& ds, const NoisingSpec& spec,
                               std::span<const ColumnRange> ranges) {
  if (ranges.size() != ds.num_features()) {
    throw Error(ErrorCode::kSchemaMismatch, "ranges do not match dataset width");
  }
  const auto cols = ds.schema().group(spec.target);
  if (cols.empty()) {
    throw Error(ErrorCode::kUnknownGroup,
                "no columns of group " + std::string(telemetry::base_param_name(spec.target)));
  }
  RowMatrix x = ds.features();
  Rng rng(derive_seed(spec.seed, seed_salt::kNoise));
  for (std::size_t c : cols) {
    const ColumnRange r = ranges[c];
    const auto j = static_cast<Eigen::Index>(c);
    if (!(r.hi > r.lo)) {
      x.col(j).setConstant(r.lo);
      continue;
    }
    std::uniform_real_distribution<double> u(r.lo, r.hi);
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = u(rng);
  }
  return ds.with_features(std::move(x), ds.provenance());
}

}  // namespace opms::resilience
