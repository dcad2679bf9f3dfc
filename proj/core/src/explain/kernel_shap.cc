#include "opms/explain/kernel_shap.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "opms/error.h"
#include "opms/random.h"

namespace opms::explain {
namespace {

constexpr Eigen::Index kMaxBatchRows = 4096;

double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

// Mean score per coalition row of `z` (0/1 entries).
std::vector<double> coalition_values(const BatchScorer& score, const RowMatrix& background,
                                     std::span<const double> x, const RowMatrix& z) {
  const Eigen::Index nb = background.rows();
  const Eigen::Index m = background.cols();
  const Eigen::Index per_chunk = std::max<Eigen::Index>(1, kMaxBatchRows / nb);
  std::vector<double> values(static_cast<std::size_t>(z.rows()));
  RowMatrix composite;
  std::vector<double> out;
  for (Eigen::Index start = 0; start < z.rows(); start += per_chunk) {
    const Eigen::Index count = std::min(per_chunk, z.rows() - start);
    composite.resize(count * nb, m);
    for (Eigen::Index c = 0; c < count; ++c) {
      composite.middleRows(c * nb, nb) = background;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (z(start + c, j) != 0.0) {
          composite.block(c * nb, j, nb, 1).setConstant(x[static_cast<std::size_t>(j)]);
        }
      }
    }
    out.assign(static_cast<std::size_t>(count * nb), 0.0);
    score(composite, out);
    for (Eigen::Index c = 0; c < count; ++c) {
      const auto first = out.begin() + c * nb;
      values[static_cast<std::size_t>(start + c)] =
          std::accumulate(first, first + nb, 0.0) / static_cast<double>(nb);
    }
  }
  return values;
}

void check_inputs(const RowMatrix& background, std::span<const double> x) {
  if (background.rows() == 0) throw Error(ErrorCode::kEmptyBackground, "background set is empty");
  if (static_cast<std::size_t>(background.cols()) != x.size()) {
    throw Error(ErrorCode::kSchemaMismatch, "sample and background widths differ");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteInput, "sample contains NaN or inf");
  }
}

}  // namespace

double coalition_value(const BatchScorer& score, const RowMatrix& background,
                       std::span<const double> x, std::uint32_t mask) {
  check_inputs(background, x);
  RowMatrix z(1, background.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j) z(0, j) = (mask >> j) & 1u ? 1.0 : 0.0;
  return coalition_values(score, background, x, z)[0];
}

ValueFunction interventional_value_function(const BatchScorer& score,
                                            const RowMatrix& background,
                                            std::span<const double> x) {
  check_inputs(background, x);
  return [&score, &background, x](std::uint32_t mask) {
    return coalition_value(score, background, x, mask);
  };
}

KernelShapResult kernel_shap(const BatchScorer& score, const RowMatrix& background,
                             std::span<const double> x, const KernelShapOptions& options) {
  check_inputs(background, x);
  const int m = static_cast<int>(x.size());
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "need at least one feature");

  KernelShapResult result;
  {
    RowMatrix ends(2, m);
    ends.row(0).setZero();
    ends.row(1).setOnes();
    auto v = coalition_values(score, background, x, ends);
    result.base_value = v[0];
    result.output = v[1];
  }
  const double total = result.output - result.base_value;
  result.exact = options.mode == KernelShapMode::kExact ||
                 (options.mode == KernelShapMode::kAuto && m <= kMaxEnumeratedFeatures);
  if (m == 1) {
    result.phi = {total};
    result.exact = true;
    return result;
  }

  RowMatrix z;
  Eigen::VectorXd w;
  if (result.exact) {
    if (m > kMaxExactFeatures) {
      throw Error(ErrorCode::kTooManyFeatures, "exact enumeration limited to 20 features");
    }
    const std::uint32_t n = (1u << m) - 2;
    z.resize(n, m);
    w.resize(n);
    for (std::uint32_t k = 0; k < n; ++k) {
      const std::uint32_t mask = k + 1;
      int size = 0;
      for (int j = 0; j < m; ++j) {
        const bool in = (mask >> j) & 1u;
        z(k, j) = in ? 1.0 : 0.0;
        size += in;
      }
      w(k) = (m - 1.0) / (binomial(m, size) * size * (m - size));
    }
  } else {
    if (options.n_coalitions < 2) {
      throw Error(ErrorCode::kInvalidArgument, "n_coalitions must be >= 2");
    }
    const int pairs = options.n_coalitions / 2;
    std::vector<double> size_mass;
    for (int s = 1; s < m; ++s) size_mass.push_back((m - 1.0) / (s * (m - s)));
    std::discrete_distribution<int> size_dist(size_mass.begin(), size_mass.end());
    Rng rng(derive_seed(options.seed, seed_salt::kCoalitions));
    std::vector<int> order(static_cast<std::size_t>(m));
    // Repeated draws are merged; the multiplicity becomes the weight.
    std::map<std::vector<bool>, double> counts;
    std::vector<bool> mask(static_cast<std::size_t>(m));
    for (int p = 0; p < pairs; ++p) {
      const int size = size_dist(rng) + 1;
      std::iota(order.begin(), order.end(), 0);
      for (int i = 0; i < size; ++i) {
        std::uniform_int_distribution<int> pick(i, m - 1);
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(pick(rng))]);
      }
      std::fill(mask.begin(), mask.end(), false);
      for (int i = 0; i < size; ++i) mask[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = true;
      counts[mask] += 1.0;
      mask.flip();
      counts[mask] += 1.0;
    }
    z.resize(static_cast<Eigen::Index>(counts.size()), m);
    w.resize(static_cast<Eigen::Index>(counts.size()));
    Eigen::Index k = 0;
    for (const auto& [bits, count] : counts) {
      for (int j = 0; j < m; ++j) z(k, j) = bits[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
      w(k++) = count;
    }
  }

  const auto values = coalition_values(score, background, x, z);

  // Substitute phi_last = total - sum(others) and solve the reduced problem.
  const Eigen::Index n = z.rows();
  Eigen::MatrixXd a(n, m - 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double last = z(k, m - 1);
    const double sw = std::sqrt(w(k));
    for (int j = 0; j < m - 1; ++j) a(k, j) = sw * (z(k, j) - last);
    y(k) = sw * (values[static_cast<std::size_t>(k)] - result.base_value - last * total);
  }
  Eigen::VectorXd reduced;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() == m - 1) {
    reduced = qr.solve(y);
  } else {
    Eigen::MatrixXd normal = a.transpose() * a;
    normal.diagonal().array() += 1e-10;
    reduced = normal.ldlt().solve(a.transpose() * y);
    result.regularized = true;
  }
  result.phi.assign(reduced.data(), reduced.data() + reduced.size());
  result.phi.push_back(total - reduced.sum());
  const double sum = std::accumulate(result.phi.begin(), result.phi.end(), 0.0);
  result.residual = std::abs(result.base_value + sum - result.output);
  return result;
}

}  // namespace opms::explain
