#include "opms/models/scaler.h"

#include <cmath>
#include <limits>

namespace opms::models {

StandardScaler StandardScaler::fit(const RowMatrix& x) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd mean = x.colwise().mean().transpose();
  Eigen::VectorXd scale(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = (x.col(c).array() - mean(c)).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    // Columns that are constant up to rounding noise are treated as constant.
    const double floor = 10.0 * std::numeric_limits<double>::epsilon() * std::abs(mean(c));
    scale(c) = sd > 0.0 && sd > floor ? sd : 1.0;
  }
  return StandardScaler(std::move(mean), std::move(scale));
}

RowMatrix StandardScaler::transform(const RowMatrix& x) const {
  return ((x.rowwise() - mean_.transpose()).array().rowwise() /
          scale_.transpose().array())
      .matrix();
}

RowMatrix StandardScaler::inverse_transform(const RowMatrix& z) const {
  return ((z.array().rowwise() * scale_.transpose().array()).matrix().rowwise() +
          mean_.transpose());
}

}  // namespace opms::models
