#ifndef OPMS_MODELS_TIMING_H_
#define OPMS_MODELS_TIMING_H_

#include "opms/models/trained_model.h"

namespace opms::models {

struct InferenceTiming {
  double median_ns_per_sample = 0.0;
  double iqr_ns_per_sample = 0.0;  // interquartile range
};

// Wall-clock latency of full-batch predict_proba, `repetitions` >= 5 times.
InferenceTiming measure_inference_time(const TrainedModel& model, const RowMatrix& x,
                                       int repetitions);

}  // namespace opms::models

#endif  // OPMS_MODELS_TIMING_H_
