#ifndef OPMS_MODELS_GBT_H_
#define OPMS_MODELS_GBT_H_

#include <span>
#include <vector>

#include "opms/models/config.h"
#include "opms/telemetry/dataset.h"

namespace opms::models {

// Internal nodes send x[feature] <= threshold to `left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output (already scaled by the learning rate)
  double gain = 0.0;   // split gain for internal nodes
  double cover = 0.0;  // hessian sum of training rows reaching the node

  bool is_leaf() const { return left < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  int depth() const;
};

struct GbtModel {
  std::vector<Tree> trees;
  // Mean training logistic loss after each boosting round.
  std::vector<double> training_loss;

  // Sum of leaf values; the model probability is sigmoid(margin).
  double margin(std::span<const double> x) const;
};

// Stage-wise Newton boosting on logistic loss from a zero margin. Splits
// maximize 1/2 [GL^2/(HL+l2) + GR^2/(HR+l2) - G^2/(H+l2)] over all
// thresholds between consecutive distinct values; a split needs positive gain
// and min_child_weight hessian on both sides. Trees grow level by level.
GbtModel train_gbt(const RowMatrix& x, std::span<const double> y, const GbtConfig& cfg);

}  // namespace opms::models

#endif  // OPMS_MODELS_GBT_H_
