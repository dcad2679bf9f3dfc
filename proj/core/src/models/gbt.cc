#include "opms/models/gbt.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace opms::models {
namespace {

constexpr double kMinSplitGain = 1e-6;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double mean_log_loss(std::span<const double> margin, std::span<const double> y) {
  double total = 0.0;
  for (std::size_t i = 0; i < margin.size(); ++i) {
    const double z = margin[i];
    const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    total += softplus - y[i] * z;
  }
  return total / static_cast<double>(margin.size());
}

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
  double left_g = 0.0;
  double left_h = 0.0;
};

struct NodeStats {
  double g = 0.0;
  double h = 0.0;
};

}  // namespace

double Tree::predict(std::span<const double> x) const {
  int k = 0;
  while (!nodes[static_cast<std::size_t>(k)].is_leaf()) {
    const TreeNode& n = nodes[static_cast<std::size_t>(k)];
    k = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(k)].value;
}

int Tree::depth() const {
  std::function<int(int)> rec = [&](int k) -> int {
    const TreeNode& n = nodes[static_cast<std::size_t>(k)];
    return n.is_leaf() ? 0 : 1 + std::max(rec(n.left), rec(n.right));
  };
  return nodes.empty() ? 0 : rec(0);
}

double GbtModel::margin(std::span<const double> x) const {
  double m = 0.0;
  for (const Tree& t : trees) m += t.predict(x);
  return m;
}

GbtModel train_gbt(const RowMatrix& x, std::span<const double> y, const GbtConfig& cfg) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto d = static_cast<std::size_t>(x.cols());
  const double lambda = cfg.l2_leaf;

  // Row indices sorted by each feature once.
  std::vector<std::vector<std::size_t>> sorted(d);
  for (std::size_t f = 0; f < d; ++f) {
    auto& idx = sorted[f];
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return x(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(f)) <
             x(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(f));
    });
  }

  auto score = [lambda](double g, double h) { return g * g / (h + lambda); };

  GbtModel model;
  std::vector<double> margin(n, 0.0), grad(n), hess(n);
  std::vector<int> node_of(n);

  for (int t = 0; t < cfg.n_trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(margin[i]);
      grad[i] = p - y[i];
      hess[i] = p * (1.0 - p);
    }
    Tree tree;
    std::vector<NodeStats> stats(1);
    for (std::size_t i = 0; i < n; ++i) {
      stats[0].g += grad[i];
      stats[0].h += hess[i];
    }
    tree.nodes.push_back({});
    tree.nodes[0].cover = stats[0].h;
    std::fill(node_of.begin(), node_of.end(), 0);
    std::vector<int> frontier = {0};

    for (int depth = 0; depth < cfg.max_depth && !frontier.empty(); ++depth) {
      // slot[k] is the frontier position of node k, or -1.
      std::vector<int> slot(tree.nodes.size(), -1);
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        slot[static_cast<std::size_t>(frontier[s])] = static_cast<int>(s);
      }
      std::vector<SplitCandidate> best(frontier.size());
      std::vector<double> gl(frontier.size()), hl(frontier.size()), last(frontier.size());
      std::vector<char> has_last(frontier.size());

      for (std::size_t f = 0; f < d; ++f) {
        std::fill(gl.begin(), gl.end(), 0.0);
        std::fill(hl.begin(), hl.end(), 0.0);
        std::fill(has_last.begin(), has_last.end(), 0);
        for (std::size_t i : sorted[f]) {
          const int s = slot[static_cast<std::size_t>(node_of[i])];
          if (s < 0) continue;
          const auto su = static_cast<std::size_t>(s);
          const double v = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f));
          if (has_last[su] && v != last[su]) {
            const NodeStats& total = stats[static_cast<std::size_t>(frontier[su])];
            const double gr = total.g - gl[su];
            const double hr = total.h - hl[su];
            if (hl[su] >= cfg.min_child_weight && hr >= cfg.min_child_weight) {
              const double gain =
                  0.5 * (score(gl[su], hl[su]) + score(gr, hr) - score(total.g, total.h));
              if (gain > best[su].gain) {
                double thr = last[su] + 0.5 * (v - last[su]);
                if (!(thr < v)) thr = last[su];
                best[su] = {gain, static_cast<int>(f), thr, gl[su], hl[su]};
              }
            }
          }
          gl[su] += grad[i];
          hl[su] += hess[i];
          last[su] = v;
          has_last[su] = 1;
        }
      }

      std::vector<int> next;
      for (std::size_t s = 0; s < frontier.size(); ++s) {
        if (best[s].feature < 0 || best[s].gain <= kMinSplitGain) continue;
        const auto k = static_cast<std::size_t>(frontier[s]);
        const NodeStats total = stats[k];
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes.push_back({});
        stats.push_back({best[s].left_g, best[s].left_h});
        stats.push_back({total.g - best[s].left_g, total.h - best[s].left_h});
        TreeNode& node = tree.nodes[k];
        node.feature = best[s].feature;
        node.threshold = best[s].threshold;
        node.left = left;
        node.right = left + 1;
        node.gain = best[s].gain;
        tree.nodes[static_cast<std::size_t>(left)].cover = stats[static_cast<std::size_t>(left)].h;
        tree.nodes[static_cast<std::size_t>(left + 1)].cover = stats[static_cast<std::size_t>(left + 1)].h;
        next.push_back(left);
        next.push_back(left + 1);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(node_of[i])];
        if (node.is_leaf()) continue;
        node_of[i] = x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(node.feature)) <=
                             node.threshold
                         ? node.left
                         : node.right;
      }
      frontier = std::move(next);
    }

    for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
      TreeNode& node = tree.nodes[k];
      if (!node.is_leaf()) continue;
      node.value = stats[k].h < cfg.min_child_weight
                       ? 0.0
                       : -cfg.learning_rate * stats[k].g / (stats[k].h + lambda);
    }
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += tree.nodes[static_cast<std::size_t>(node_of[i])].value;
    }
    model.trees.push_back(std::move(tree));
    model.training_loss.push_back(mean_log_loss(margin, y));
  }
  return model;
}

}  // namespace opms::models
