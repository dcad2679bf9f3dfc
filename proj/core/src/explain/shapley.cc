#include "opms/explain/shapley.h"

#include <bit>
#include <cmath>

#include "opms/error.h"

namespace opms::explain {

double shapley_weight(int m, int s) {
  // 1 / (m * C(m-1, s)) avoids overflowing factorials.
  return std::exp(std::lgamma(s + 1.0) + std::lgamma(m - s + 0.0) - std::lgamma(m + 1.0));
}

std::vector<double> exact_shapley(const ValueFunction& v, int m) {
  if (m > kMaxExactFeatures) {
    throw Error(ErrorCode::kTooManyFeatures,
                std::to_string(m) + " features exceeds the exact limit of " +
                    std::to_string(kMaxExactFeatures));
  }
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one feature");
  const std::uint32_t n = 1u << m;
  std::vector<double> values(n);
  for (std::uint32_t s = 0; s < n; ++s) values[s] = v(s);
  std::vector<double> weight(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) weight[static_cast<std::size_t>(s)] = shapley_weight(m, s);

  std::vector<double> phi(static_cast<std::size_t>(m), 0.0);
  for (std::uint32_t s = 0; s < n; ++s) {
    const int size = std::popcount(s);
    if (size == m) continue;
    const double w = weight[static_cast<std::size_t>(size)];
    for (int j = 0; j < m; ++j) {
      const std::uint32_t bit = 1u << j;
      if (s & bit) continue;
      phi[static_cast<std::size_t>(j)] += w * (values[s | bit] - values[s]);
    }
  }
  return phi;
}

}  // namespace opms::explain
