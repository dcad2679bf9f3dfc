#include "opms/explain/tree_shap.h"

#include <array>
#include <cmath>

#include "opms/error.h"

namespace opms::explain {
namespace {

constexpr int kMaxPath = 64;

const std::array<double, kMaxPath + 1>& factorials() {
  static const auto table = [] {
    std::array<double, kMaxPath + 1> f{};
    f[0] = 1.0;
    for (int i = 1; i <= kMaxPath; ++i) f[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i - 1)] * i;
    return f;
  }();
  return table;
}

enum class Side : char { kNone, kX, kZ };

struct Walker {
  const models::Tree& tree;
  std::span<const double> x;
  std::span<const double> z;
  std::span<double> phi;
  std::vector<Side> side;
  std::vector<int> from_x;
  std::vector<int> from_z;

  int child(const models::TreeNode& node, std::span<const double> row) const {
    return row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }

  void leaf(double value) {
    const auto& f = factorials();
    const auto a = from_x.size();
    const auto b = from_z.size();
    if (a + b > kMaxPath) throw Error(ErrorCode::kInvalidArgument, "tree path too deep");
    if (a > 0) {
      const double w = f[a - 1] * f[b] / f[a + b] * value;
      for (int j : from_x) phi[static_cast<std::size_t>(j)] += w;
    }
    if (b > 0) {
      const double w = f[a] * f[b - 1] / f[a + b] * value;
      for (int j : from_z) phi[static_cast<std::size_t>(j)] -= w;
    }
  }

  void walk(int k) {
    const models::TreeNode& node = tree.nodes[static_cast<std::size_t>(k)];
    if (node.is_leaf()) {
      leaf(node.value);
      return;
    }
    const int cx = child(node, x);
    const int cz = child(node, z);
    if (cx == cz) {
      walk(cx);
      return;
    }
    Side& s = side[static_cast<std::size_t>(node.feature)];
    if (s == Side::kX) {
      walk(cx);
    } else if (s == Side::kZ) {
      walk(cz);
    } else {
      s = Side::kX;
      from_x.push_back(node.feature);
      walk(cx);
      from_x.pop_back();
      s = Side::kZ;
      from_z.push_back(node.feature);
      walk(cz);
      from_z.pop_back();
      s = Side::kNone;
    }
  }
};

}  // namespace

void tree_shap_single(const models::Tree& tree, std::span<const double> x,
                      std::span<const double> z, std::span<double> phi) {
  if (tree.nodes.empty()) return;
  Walker w{tree, x, z, phi, std::vector<Side>(x.size(), Side::kNone), {}, {}};
  w.walk(0);
}

TreeShapResult tree_shap(const models::GbtModel& model, const RowMatrix& background,
                         std::span<const double> x) {
  if (background.rows() == 0) throw Error(ErrorCode::kEmptyBackground, "background set is empty");
  if (static_cast<std::size_t>(background.cols()) != x.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "sample and background widths differ");
  }
  TreeShapResult r;
  r.phi.assign(x.size(), 0.0);
  r.output = model.margin(x);
  const auto d = static_cast<std::size_t>(background.cols());
  for (Eigen::Index b = 0; b < background.rows(); ++b) {
    std::span<const double> z(background.row(b).data(), d);
    r.base_value += model.margin(z);
    for (const auto& tree : model.trees) tree_shap_single(tree, x, z, r.phi);
  }
  const auto nb = static_cast<double>(background.rows());
  r.base_value /= nb;
  for (double& p : r.phi) p /= nb;
  return r;
}

}  // namespace opms::explain
