#include "opms/models/timing.h"

#include <algorithm>
#include <chrono>
#include <vector>

#include "opms/error.h"

namespace opms::models {
namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

InferenceTiming measure_inference_time(const TrainedModel& model, const RowMatrix& x,
                                       int repetitions) {
  if (x.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "empty probe set");
  if (repetitions < 5) throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 5");
  // One untimed pass warms caches and allocations.
  volatile double sink = model.predict_proba(x)[0];
  std::vector<double> per_sample;
  per_sample.reserve(static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    auto p = model.predict_proba(x);
    const auto stop = std::chrono::steady_clock::now();
    sink = p[0];
    const double ns = std::chrono::duration<double, std::nano>(stop - start).count();
    per_sample.push_back(std::max(ns, 1.0) / static_cast<double>(x.rows()));
  }
  (void)sink;
  return {quantile(per_sample, 0.5), quantile(per_sample, 0.75) - quantile(per_sample, 0.25)};
}

}  // namespace opms::models
