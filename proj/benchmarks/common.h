#ifndef OPMS_BENCHMARKS_COMMON_H_
#define OPMS_BENCHMARKS_COMMON_H_

#include "opms/models/trained_model.h"
#include "opms/selection/selection.h"
#include "opms/telemetry/dataset.h"

namespace opms::bench {

// Aggregated train/test split at desk scale, shared by the suites.
struct Fixture {
  telemetry::Dataset train;
  telemetry::Dataset test;
  selection::FeatureSet selected;
};

const Fixture& fixture();
const models::TrainedModel& trained(models::ModelKind kind, bool selected);

}  // namespace opms::bench

#endif  // OPMS_BENCHMARKS_COMMON_H_
