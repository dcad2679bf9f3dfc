#ifndef OPMS_MODELS_NEURAL_NET_H_
#define OPMS_MODELS_NEURAL_NET_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "opms/models/config.h"
#include "opms/models/scaler.h"
#include "opms/telemetry/dataset.h"

namespace opms::models {

// One hidden ReLU layer feeding a single logistic output unit.
struct NeuralNet {
  Eigen::MatrixXd hidden_weights;  // hidden x inputs
  Eigen::VectorXd hidden_bias;     // hidden
  Eigen::VectorXd output_weights;  // hidden
  double output_bias = 0.0;

  NeuralNet() = default;
  NeuralNet(int inputs, int hidden);

  int inputs() const { return static_cast<int>(hidden_weights.cols()); }
  int hidden() const { return static_cast<int>(hidden_weights.rows()); }

  // Pre-sigmoid output per row.
  Eigen::VectorXd margin(const RowMatrix& x) const;

  // Parameters flattened as [hidden_weights (row-major), hidden_bias,
  // output_weights, output_bias].
  std::size_t num_parameters() const;
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  // Mean binary cross-entropy plus l2 / (2 n) * sum of squared weights
  // (biases unpenalized). Writes the gradient in parameters() layout when
  // `gradient` is non-null.
  double loss(const RowMatrix& x, std::span<const double> y, double l2,
              std::vector<double>* gradient) const;
};

struct NeuralNetModel {
  StandardScaler scaler;
  NeuralNet net;
  int epochs_run = 0;
  std::vector<double> loss_curve;
};

// Glorot-uniform init, shuffled mini-batches, Adam with bias correction.
NeuralNetModel train_neural_net(const RowMatrix& x, std::span<const double> y,
                                const NeuralNetConfig& cfg, std::uint64_t seed);

}  // namespace opms::models

#endif  // OPMS_MODELS_NEURAL_NET_H_
