#ifndef OPMS_EXPLAIN_KERNEL_SHAP_H_
#define OPMS_EXPLAIN_KERNEL_SHAP_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "opms/explain/shapley.h"
#include "opms/telemetry/dataset.h"

namespace opms::explain {

// Scores every row of a matrix into `out` (one value per row).
using BatchScorer = std::function<void(const RowMatrix&, std::span<double>)>;

enum class KernelShapMode {
  kAuto,     // exact enumeration when m <= kMaxEnumeratedFeatures
  kExact,
  kSampled,
};

inline constexpr int kMaxEnumeratedFeatures = 12;

struct KernelShapOptions {
  KernelShapMode mode = KernelShapMode::kAuto;
  int n_coalitions = 2048;
  std::uint64_t seed = 0;
};

struct KernelShapResult {
  double base_value = 0.0;  // v(empty)
  double output = 0.0;      // v(full) = score(x)
  std::vector<double> phi;
  // |base_value + sum(phi) - output|
  double residual = 0.0;
  bool exact = false;
  bool regularized = false;  // normal equations needed diagonal loading
};

// v(S): mean score over background rows with the features in S taken from x.
double coalition_value(const BatchScorer& score, const RowMatrix& background,
                       std::span<const double> x, std::uint32_t mask);

// Interventional value function for exact_shapley. Holds references to all
// three arguments.
ValueFunction interventional_value_function(const BatchScorer& score,
                                            const RowMatrix& background,
                                            std::span<const double> x);

// Shapley-kernel weighted least squares with the efficiency constraint.
// Exact mode enumerates all 2^m - 2 proper coalitions; sampled mode draws
// complementary pairs with sizes proportional to the kernel mass.
// Throws EmptyBackground, NonFiniteInput, InvalidArgument.
KernelShapResult kernel_shap(const BatchScorer& score, const RowMatrix& background,
                             std::span<const double> x, const KernelShapOptions& options = {});

}  // namespace opms::explain

#endif  // OPMS_EXPLAIN_KERNEL_SHAP_H_
