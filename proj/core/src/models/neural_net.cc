#include "opms/models/neural_net.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "opms/random.h"

namespace opms::models {
namespace {

// Numerically stable log(1 + exp(z)).
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

NeuralNet::NeuralNet(int inputs, int hidden)
    : hidden_weights(Eigen::MatrixXd::Zero(hidden, inputs)),
      hidden_bias(Eigen::VectorXd::Zero(hidden)),
      output_weights(Eigen::VectorXd::Zero(hidden)) {}

Eigen::VectorXd NeuralNet::margin(const RowMatrix& x) const {
  Eigen::MatrixXd act = (x * hidden_weights.transpose()).rowwise() +
                        hidden_bias.transpose();
  act = act.cwiseMax(0.0);
  return (act * output_weights).array() + output_bias;
}

std::size_t NeuralNet::num_parameters() const {
  return static_cast<std::size_t>(hidden_weights.size() + hidden_bias.size() +
                                  output_weights.size() + 1);
}

std::vector<double> NeuralNet::parameters() const {
  std::vector<double> flat;
  flat.reserve(num_parameters());
  for (Eigen::Index r = 0; r < hidden_weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < hidden_weights.cols(); ++c) {
      flat.push_back(hidden_weights(r, c));
    }
  }
  flat.insert(flat.end(), hidden_bias.data(), hidden_bias.data() + hidden_bias.size());
  flat.insert(flat.end(), output_weights.data(),
              output_weights.data() + output_weights.size());
  flat.push_back(output_bias);
  return flat;
}

void NeuralNet::set_parameters(std::span<const double> flat) {
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < hidden_weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < hidden_weights.cols(); ++c) {
      hidden_weights(r, c) = flat[k++];
    }
  }
  for (Eigen::Index i = 0; i < hidden_bias.size(); ++i) hidden_bias(i) = flat[k++];
  for (Eigen::Index i = 0; i < output_weights.size(); ++i) output_weights(i) = flat[k++];
  output_bias = flat[k];
}

double NeuralNet::loss(const RowMatrix& x, std::span<const double> y, double l2,
                       std::vector<double>* gradient) const {
  const auto n = static_cast<double>(x.rows());
  Eigen::MatrixXd pre = (x * hidden_weights.transpose()).rowwise() +
                        hidden_bias.transpose();
  Eigen::MatrixXd act = pre.cwiseMax(0.0);
  Eigen::VectorXd z = (act * output_weights).array() + output_bias;

  double data_loss = 0.0;
  Eigen::VectorXd dz(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double yi = y[static_cast<std::size_t>(i)];
    // -y log p - (1-y) log(1-p) = softplus(z) - y z
    data_loss += softplus(z(i)) - yi * z(i);
    dz(i) = (sigmoid(z(i)) - yi) / n;
  }
  const double penalty =
      0.5 * l2 / n * (hidden_weights.squaredNorm() + output_weights.squaredNorm());
  const double total = data_loss / n + penalty;
  if (gradient == nullptr) return total;

  Eigen::VectorXd g_out_w = act.transpose() * dz + (l2 / n) * output_weights;
  const double g_out_b = dz.sum();
  Eigen::MatrixXd d_pre = (dz * output_weights.transpose()).array() *
                          (pre.array() > 0.0).cast<double>();
  Eigen::MatrixXd g_hid_w = d_pre.transpose() * x + (l2 / n) * hidden_weights;
  Eigen::VectorXd g_hid_b = d_pre.colwise().sum().transpose();

  NeuralNet g;
  g.hidden_weights = std::move(g_hid_w);
  g.hidden_bias = std::move(g_hid_b);
  g.output_weights = std::move(g_out_w);
  g.output_bias = g_out_b;
  *gradient = g.parameters();
  return total;
}

NeuralNetModel train_neural_net(const RowMatrix& x, std::span<const double> y,
                                const NeuralNetConfig& cfg, std::uint64_t seed) {
  NeuralNetModel model;
  model.scaler = StandardScaler::fit(x);
  const RowMatrix xs = model.scaler.transform(x);
  const auto n = static_cast<std::size_t>(xs.rows());
  const int inputs = static_cast<int>(xs.cols());

  Rng rng(derive_seed(seed, seed_salt::kFit));
  NeuralNet net(inputs, cfg.hidden_units);
  {
    const double hid_bound = std::sqrt(6.0 / (inputs + cfg.hidden_units));
    const double out_bound = std::sqrt(6.0 / (cfg.hidden_units + 1));
    std::uniform_real_distribution<double> hid(-hid_bound, hid_bound);
    std::uniform_real_distribution<double> out(-out_bound, out_bound);
    for (Eigen::Index i = 0; i < net.hidden_weights.size(); ++i) net.hidden_weights.data()[i] = hid(rng);
    for (Eigen::Index i = 0; i < net.hidden_bias.size(); ++i) net.hidden_bias(i) = hid(rng);
    for (Eigen::Index i = 0; i < net.output_weights.size(); ++i) net.output_weights(i) = out(rng);
    net.output_bias = out(rng);
  }

  std::vector<double> params = net.parameters();
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), grad;
  const std::size_t batch = std::clamp<std::size_t>(static_cast<std::size_t>(cfg.batch_size), 1, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RowMatrix xb;
  std::vector<double> yb;
  long step = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  int stale_epochs = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t len = std::min(batch, n - start);
      xb.resize(static_cast<Eigen::Index>(len), xs.cols());
      yb.resize(len);
      for (std::size_t k = 0; k < len; ++k) {
        xb.row(static_cast<Eigen::Index>(k)) = xs.row(static_cast<Eigen::Index>(order[start + k]));
        yb[k] = y[order[start + k]];
      }
      net.set_parameters(params);
      epoch_loss += net.loss(xb, yb, cfg.l2, &grad) * static_cast<double>(len);

      ++step;
      const double bias1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bias2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      const double lr = cfg.learning_rate * std::sqrt(bias2) / bias1;
      for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        params[i] -= lr * m[i] / (std::sqrt(v[i]) + cfg.epsilon);
      }
    }
    epoch_loss /= static_cast<double>(n);
    model.loss_curve.push_back(epoch_loss);
    model.epochs_run = epoch + 1;
    if (epoch_loss > best_loss - cfg.tolerance) {
      ++stale_epochs;
    } else {
      stale_epochs = 0;
    }
    best_loss = std::min(best_loss, epoch_loss);
    if (stale_epochs >= cfg.patience) break;
  }
  net.set_parameters(params);
  model.net = std::move(net);
  return model;
}

}  // namespace opms::models
