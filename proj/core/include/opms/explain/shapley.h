#ifndef OPMS_EXPLAIN_SHAPLEY_H_
#define OPMS_EXPLAIN_SHAPLEY_H_

#include <cstdint>
#include <functional>
#include <vector>

namespace opms::explain {

inline constexpr int kMaxExactFeatures = 20;

// Set function over coalitions encoded as bitmasks (bit j = feature j).
using ValueFunction = std::function<double(std::uint32_t)>;

// Brute-force Shapley values by enumerating all 2^m coalitions.
// Throws TooManyFeatures when m > 20.
std::vector<double> exact_shapley(const ValueFunction& v, int m);

// |S|! (m - |S| - 1)! / m!
double shapley_weight(int m, int coalition_size);

}  // namespace opms::explain

#endif  // OPMS_EXPLAIN_SHAPLEY_H_
