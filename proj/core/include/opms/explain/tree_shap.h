#ifndef OPMS_EXPLAIN_TREE_SHAP_H_
#define OPMS_EXPLAIN_TREE_SHAP_H_

#include <span>
#include <vector>

#include "opms/models/gbt.h"
#include "opms/telemetry/dataset.h"

namespace opms::explain {

// Exact Shapley values of the single-reference game
//   v(S) = tree(x_S, z_rest)
// so that sum(phi) = tree(x) - tree(z). Cost is linear in the number of
// leaves reachable by mixing x and z.
void tree_shap_single(const models::Tree& tree, std::span<const double> x,
                      std::span<const double> z, std::span<double> phi);

struct TreeShapResult {
  double base_value = 0.0;  // mean background margin
  double output = 0.0;      // margin of x
  std::vector<double> phi;
};

// Interventional SHAP of the ensemble margin, averaged over background rows.
// Throws EmptyBackground.
TreeShapResult tree_shap(const models::GbtModel& model, const RowMatrix& background,
                         std::span<const double> x);

}  // namespace opms::explain

#endif  // OPMS_EXPLAIN_TREE_SHAP_H_
