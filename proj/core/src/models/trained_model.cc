#include "opms/models/trained_model.h"

#include <algorithm>
#include <cmath>

#include "opms/error.h"
#include "opms/io.h"

namespace opms::models {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

TrainedModel::TrainedModel(Impl impl, telemetry::FeatureSchema schema)
    : impl_(std::move(impl)), schema_(std::move(schema)) {}

ModelKind TrainedModel::kind() const {
  switch (impl_.index()) {
    case 0: return ModelKind::kNeuralNet;
    case 1: return ModelKind::kGradientBoostedTrees;
    default: return ModelKind::kKernelSvm;
  }
}

bool TrainedModel::converged() const {
  if (const auto* svm = std::get_if<SvmModel>(&impl_)) return svm->converged;
  return true;
}

void TrainedModel::validate(const RowMatrix& x) const {
  if (static_cast<std::size_t>(x.cols()) != schema_.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "input has " + std::to_string(x.cols()) + " columns, model expects " +
                    std::to_string(schema_.size()));
  }
  if (!x.allFinite()) throw Error(ErrorCode::kNonFiniteInput, "input contains NaN or inf");
}

std::vector<double> TrainedModel::margin(const RowMatrix& x) const {
  validate(x);
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<double> out(n);
  std::visit(Overloaded{
                 [&](const NeuralNetModel& m) {
                   Eigen::VectorXd z = m.net.margin(m.scaler.transform(x));
                   std::copy(z.data(), z.data() + z.size(), out.begin());
                 },
                 [&](const GbtModel& m) {
                   for (std::size_t i = 0; i < n; ++i) {
                     out[i] = m.margin({x.row(static_cast<Eigen::Index>(i)).data(),
                                        static_cast<std::size_t>(x.cols())});
                   }
                 },
                 [&](const SvmModel& m) {
                   Eigen::VectorXd z = m.decision(m.scaler.transform(x));
                   std::copy(z.data(), z.data() + z.size(), out.begin());
                 }},
             impl_);
  return out;
}

void TrainedModel::predict_proba_unchecked(const RowMatrix& x, std::span<double> out) const {
  const auto n = static_cast<std::size_t>(x.rows());
  std::visit(Overloaded{
                 [&](const NeuralNetModel& m) {
                   Eigen::VectorXd z = m.net.margin(m.scaler.transform(x));
                   for (std::size_t i = 0; i < n; ++i) out[i] = sigmoid(z(static_cast<Eigen::Index>(i)));
                 },
                 [&](const GbtModel& m) {
                   for (std::size_t i = 0; i < n; ++i) {
                     out[i] = sigmoid(m.margin({x.row(static_cast<Eigen::Index>(i)).data(),
                                                static_cast<std::size_t>(x.cols())}));
                   }
                 },
                 [&](const SvmModel& m) {
                   Eigen::VectorXd z = m.decision(m.scaler.transform(x));
                   for (std::size_t i = 0; i < n; ++i) {
                     out[i] = m.platt.probability(z(static_cast<Eigen::Index>(i)));
                   }
                 }},
             impl_);
}

std::vector<double> TrainedModel::predict_proba(const RowMatrix& x) const {
  validate(x);
  std::vector<double> out(static_cast<std::size_t>(x.rows()));
  predict_proba_unchecked(x, out);
  return out;
}

std::vector<double> TrainedModel::predict_proba(const telemetry::Dataset& ds) const {
  if (!(ds.schema() == schema_)) {
    throw Error(ErrorCode::kSchemaMismatch, "dataset schema differs from model schema");
  }
  return predict_proba(ds.features());
}

std::vector<int> TrainedModel::predict(const RowMatrix& x, double threshold) const {
  return apply_threshold(predict_proba(x), threshold);
}

std::vector<int> apply_threshold(std::span<const double> proba, double threshold) {
  std::vector<int> out(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i) out[i] = proba[i] >= threshold ? 1 : 0;
  return out;
}

TrainedModel fit(const ModelConfig& cfg, const telemetry::Dataset& train, std::uint64_t seed) {
  cfg.validate();
  auto [normal, attack] = train.class_ratio();
  if (normal == 0 || attack == 0) {
    throw Error(ErrorCode::kSingleClassTraining, "training data must contain both classes");
  }
  if (!train.features().allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "training data contains NaN or inf");
  }
  std::vector<double> y(train.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = train.labels()[i].binary();
  const RowMatrix& x = train.features();
  switch (cfg.kind) {
    case ModelKind::kNeuralNet:
      return TrainedModel(train_neural_net(x, y, cfg.neural_net, seed), train.schema());
    case ModelKind::kGradientBoostedTrees:
      return TrainedModel(train_gbt(x, y, cfg.gbt), train.schema());
    case ModelKind::kKernelSvm:
      return TrainedModel(train_svm(x, y, cfg.svm), train.schema());
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown model kind");
}

// ---- serialization ----

namespace {

using nlohmann::json;

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from(const json& j) {
  auto v = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json scaler_json(const StandardScaler& s) {
  return {{"mean", vec_json(s.mean())}, {"scale", vec_json(s.scale())}};
}

StandardScaler scaler_from(const json& j) {
  return StandardScaler(vec_from(j.at("mean")), vec_from(j.at("scale")));
}

// Dense matrices are stored as {"rows", "cols", "data"} in row-major order.
template <class M>
json matrix_json(const M& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

template <class M>
M matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw Error(ErrorCode::kFormatError, "matrix data size mismatch");
  }
  M m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
  }
  return m;
}

json node_json(const Tree& t, int k) {
  const TreeNode& n = t.nodes[static_cast<std::size_t>(k)];
  if (n.is_leaf()) return {{"leaf", n.value}, {"cover", n.cover}};
  return {{"feature", n.feature}, {"threshold", n.threshold}, {"gain", n.gain},
          {"cover", n.cover},     {"left", node_json(t, n.left)},
          {"right", node_json(t, n.right)}};
}

int node_from(const json& j, Tree& t, int num_features) {
  const int k = static_cast<int>(t.nodes.size());
  t.nodes.push_back({});
  TreeNode n;
  n.cover = j.value("cover", 0.0);
  if (j.contains("leaf")) {
    n.value = j.at("leaf").get<double>();
    if (!std::isfinite(n.value)) throw Error(ErrorCode::kFormatError, "non-finite leaf");
  } else {
    n.feature = j.at("feature").get<int>();
    if (n.feature < 0 || n.feature >= num_features) {
      throw Error(ErrorCode::kFormatError, "split feature out of range");
    }
    n.threshold = j.at("threshold").get<double>();
    n.gain = j.value("gain", 0.0);
    n.left = node_from(j.at("left"), t, num_features);
    n.right = node_from(j.at("right"), t, num_features);
  }
  t.nodes[static_cast<std::size_t>(k)] = n;
  return k;
}

}  // namespace

json to_json(const TrainedModel& model) {
  json doc = {{"format_version", kFormatVersion},
              {"kind", std::string(model_kind_name(model.kind()))},
              {"features", model.schema().names()},
              {"schema_fingerprint", model.schema_fingerprint()}};
  std::visit(Overloaded{
                 [&](const NeuralNetModel& m) {
                   doc["scaler"] = scaler_json(m.scaler);
                   doc["hidden_weights"] = matrix_json(m.net.hidden_weights);
                   doc["hidden_bias"] = vec_json(m.net.hidden_bias);
                   doc["output_weights"] = vec_json(m.net.output_weights);
                   doc["output_bias"] = m.net.output_bias;
                   doc["epochs_run"] = m.epochs_run;
                 },
                 [&](const GbtModel& m) {
                   json trees = json::array();
                   for (const Tree& t : m.trees) trees.push_back(node_json(t, 0));
                   doc["trees"] = trees;
                   doc["training_loss"] = m.training_loss;
                 },
                 [&](const SvmModel& m) {
                   doc["scaler"] = scaler_json(m.scaler);
                   doc["gamma"] = m.gamma;
                   doc["support_vectors"] = matrix_json(m.support_vectors);
                   doc["dual_coef"] = vec_json(m.dual_coef);
                   doc["rho"] = m.rho;
                   doc["platt"] = {{"A", m.platt.a}, {"B", m.platt.b}};
                   doc["converged"] = m.converged;
                   doc["iterations"] = m.iterations;
                 }},
             model.impl());
  return doc;
}

TrainedModel model_from_json(const json& doc) {
  check_format_version(doc, "model");
  try {
    auto kind = parse_model_kind(doc.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::kFormatError, "unknown model kind");
    auto names = doc.at("features").get<std::vector<std::string>>();
    auto schema = telemetry::FeatureSchema::from_names(names);
    if (doc.contains("schema_fingerprint") &&
        doc["schema_fingerprint"].get<std::uint64_t>() != schema.fingerprint()) {
      throw Error(ErrorCode::kSchemaMismatch, "schema fingerprint mismatch");
    }
    const int d = static_cast<int>(schema.size());
    switch (*kind) {
      case ModelKind::kNeuralNet: {
        NeuralNetModel m;
        m.scaler = scaler_from(doc.at("scaler"));
        m.net.hidden_weights = matrix_from<Eigen::MatrixXd>(doc.at("hidden_weights"));
        m.net.hidden_bias = vec_from(doc.at("hidden_bias"));
        m.net.output_weights = vec_from(doc.at("output_weights"));
        m.net.output_bias = doc.at("output_bias").get<double>();
        m.epochs_run = doc.value("epochs_run", 0);
        if (m.net.inputs() != d) throw Error(ErrorCode::kFormatError, "weight shape mismatch");
        return TrainedModel(std::move(m), std::move(schema));
      }
      case ModelKind::kGradientBoostedTrees: {
        GbtModel m;
        for (const auto& t : doc.at("trees")) {
          Tree tree;
          node_from(t, tree, d);
          m.trees.push_back(std::move(tree));
        }
        m.training_loss = doc.value("training_loss", std::vector<double>{});
        return TrainedModel(std::move(m), std::move(schema));
      }
      case ModelKind::kKernelSvm: {
        SvmModel m;
        m.scaler = scaler_from(doc.at("scaler"));
        m.gamma = doc.at("gamma").get<double>();
        m.support_vectors = matrix_from<RowMatrix>(doc.at("support_vectors"));
        m.dual_coef = vec_from(doc.at("dual_coef"));
        m.rho = doc.at("rho").get<double>();
        m.platt = {doc.at("platt").at("A").get<double>(), doc.at("platt").at("B").get<double>()};
        m.converged = doc.value("converged", true);
        m.iterations = doc.value("iterations", 0L);
        return TrainedModel(std::move(m), std::move(schema));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("model: ") + e.what());
  }
  throw Error(ErrorCode::kFormatError, "unreachable");
}

}  // namespace opms::models
