#ifndef OPMS_MODELS_SCALER_H_
#define OPMS_MODELS_SCALER_H_

#include <Eigen/Core>

#include "opms/telemetry/dataset.h"

namespace opms::models {

// Per-column z-score with population stddev; zero-variance columns keep
// scale 1 so they map to 0.
class StandardScaler {
 public:
  StandardScaler() = default;
  StandardScaler(Eigen::VectorXd mean, Eigen::VectorXd scale)
      : mean_(std::move(mean)), scale_(std::move(scale)) {}

  static StandardScaler fit(const RowMatrix& x);

  RowMatrix transform(const RowMatrix& x) const;
  RowMatrix inverse_transform(const RowMatrix& z) const;

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& scale() const { return scale_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
};

}  // namespace opms::models

#endif  // OPMS_MODELS_SCALER_H_
