#include "opms/models/svm.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace opms::models {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d2 += diff * diff;
  }
  return std::exp(-gamma * d2);
}

Eigen::MatrixXd rbf_gram(const RowMatrix& a, const RowMatrix& b, double gamma) {
  Eigen::VectorXd na = a.rowwise().squaredNorm();
  Eigen::VectorXd nb = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = (-2.0 * (a * b.transpose())).colwise() + na;
  d2.rowwise() += nb.transpose();
  return (-gamma * d2.cwiseMax(0.0)).array().exp();
}

SmoResult solve_smo(std::size_t n, const std::function<double(std::size_t, std::size_t)>& kernel,
                    std::span<const int> labels, double c, double tolerance,
                    long max_iterations) {
  constexpr double kTau = 1e-12;
  std::vector<std::vector<double>> cache(n);
  auto row = [&](std::size_t i) -> const std::vector<double>& {
    auto& r = cache[i];
    if (r.empty()) {
      r.resize(n);
      for (std::size_t k = 0; k < n; ++k) r[k] = kernel(i, k);
    }
    return r;
  };
  std::vector<double> diag(n);
  for (std::size_t i = 0; i < n; ++i) diag[i] = kernel(i, i);

  SmoResult res;
  auto& alpha = res.alpha;
  alpha.assign(n, 0.0);
  std::vector<double> grad(n, -1.0);  // Q alpha - e
  auto y = [&](std::size_t i) { return static_cast<double>(labels[i]); };
  auto at_upper = [&](std::size_t i) { return alpha[i] >= c; };
  auto at_lower = [&](std::size_t i) { return alpha[i] <= 0.0; };

  while (true) {
    // i: maximal violating index in I_up.
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (labels[t] > 0) {
        if (!at_upper(t) && -grad[t] >= gmax) { gmax = -grad[t]; i_sel = static_cast<std::ptrdiff_t>(t); }
      } else {
        if (!at_lower(t) && grad[t] >= gmax) { gmax = grad[t]; i_sel = static_cast<std::ptrdiff_t>(t); }
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t j_sel = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    if (i_sel >= 0) {
      const auto i = static_cast<std::size_t>(i_sel);
      const auto& ki = row(i);
      for (std::size_t t = 0; t < n; ++t) {
        double grad_diff;
        if (labels[t] > 0) {
          if (at_lower(t)) continue;
          gmax2 = std::max(gmax2, grad[t]);
          grad_diff = gmax + grad[t];
        } else {
          if (at_upper(t)) continue;
          gmax2 = std::max(gmax2, -grad[t]);
          grad_diff = gmax - grad[t];
        }
        if (grad_diff > 0) {
          double quad = diag[i] + diag[t] - 2.0 * ki[t];
          if (quad <= 0) quad = kTau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= best_obj) { best_obj = obj; j_sel = static_cast<std::ptrdiff_t>(t); }
        }
      }
    }
    res.kkt_gap = gmax + gmax2;
    if (i_sel < 0 || j_sel < 0 || res.kkt_gap < tolerance) {
      res.converged = true;
      if (i_sel < 0 || j_sel < 0) res.kkt_gap = std::max(0.0, res.kkt_gap);
      break;
    }
    if (res.iterations >= max_iterations) break;
    ++res.iterations;

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const auto& ki = row(i);
    const auto& kj = row(j);
    const double old_i = alpha[i], old_j = alpha[j];
    if (labels[i] != labels[j]) {
      double quad = diag[i] + diag[j] - 2.0 * ki[j];
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = -diff; }
      }
      if (diff > 0) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
      } else {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = c + diff; }
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * ki[j];
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
      } else {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
      }
      if (sum > c) {
        if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
      } else {
        if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t k = 0; k < n; ++k) {
      grad[k] += y(k) * (y(i) * ki[k] * di + y(j) * kj[k] * dj);
    }
  }

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double yg = y(i) * grad[i];
    if (at_upper(i)) {
      if (labels[i] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower(i)) {
      if (labels[i] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  res.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
  return res;
}

double PlattScaling::probability(double decision) const {
  const double f = decision * a + b;
  return f >= 0 ? std::exp(-f) / (1.0 + std::exp(-f)) : 1.0 / (1.0 + std::exp(f));
}

PlattScaling fit_platt(std::span<const double> decision, std::span<const int> labels) {
  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kSigma = 1e-12;
  constexpr double kEps = 1e-5;
  const std::size_t n = decision.size();
  double prior1 = 0, prior0 = 0;
  for (int l : labels) (l > 0 ? prior1 : prior0) += 1;
  const double hi = (prior1 + 1.0) / (prior1 + 2.0);
  const double lo = 1.0 / (prior0 + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = labels[i] > 0 ? hi : lo;

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = decision[i] * a + b;
      f += z >= 0 ? t[i] * z + std::log1p(std::exp(-z)) : (t[i] - 1.0) * z + std::log1p(std::exp(z));
    }
    return f;
  };

  double a = 0.0, b = std::log((prior0 + 1.0) / (prior1 + 1.0));
  double fval = objective(a, b);
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = decision[i] * a + b;
      double p, q;
      if (z >= 0) {
        p = std::exp(-z) / (1.0 + std::exp(-z));
        q = 1.0 / (1.0 + std::exp(-z));
      } else {
        p = 1.0 / (1.0 + std::exp(z));
        q = std::exp(z) / (1.0 + std::exp(z));
      }
      const double d2 = p * q;
      h11 += decision[i] * decision[i] * d2;
      h22 += d2;
      h21 += decision[i] * d2;
      const double d1 = t[i] - p;
      g1 += decision[i] * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) break;
    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;
    double step = 1.0;
    while (step >= kMinStep) {
      const double na = a + step * da, nb = b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        a = na;
        b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;
  }
  return {a, b};
}

Eigen::VectorXd SvmModel::decision(const RowMatrix& scaled) const {
  if (support_vectors.rows() == 0) {
    return Eigen::VectorXd::Constant(scaled.rows(), -rho);
  }
  return (rbf_gram(scaled, support_vectors, gamma) * dual_coef).array() - rho;
}

SvmModel train_svm(const RowMatrix& x, std::span<const double> y, const SvmConfig& cfg) {
  SvmModel model;
  model.scaler = StandardScaler::fit(x);
  const RowMatrix xs = model.scaler.transform(x);
  const auto n = static_cast<std::size_t>(xs.rows());
  if (cfg.gamma) {
    model.gamma = *cfg.gamma;
  } else {
    const double mean = xs.mean();
    const double var = (xs.array() - mean).square().mean();
    model.gamma = var > 0 ? 1.0 / (static_cast<double>(xs.cols()) * var) : 1.0;
  }
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = y[i] > 0.5 ? 1 : -1;

  const double gamma = model.gamma;
  auto kernel = [&](std::size_t i, std::size_t j) {
    return rbf_kernel({xs.row(static_cast<Eigen::Index>(i)).data(), static_cast<std::size_t>(xs.cols())},
                      {xs.row(static_cast<Eigen::Index>(j)).data(), static_cast<std::size_t>(xs.cols())},
                      gamma);
  };
  const long max_iter = static_cast<long>(cfg.max_passes) * static_cast<long>(std::max<std::size_t>(n, 1));
  SmoResult smo = solve_smo(n, kernel, labels, cfg.c, cfg.tolerance, max_iter);
  model.converged = smo.converged;
  model.iterations = smo.iterations;
  model.rho = smo.rho;

  std::vector<Eigen::Index> sv;
  for (std::size_t i = 0; i < n; ++i) {
    if (smo.alpha[i] > 0.0) sv.push_back(static_cast<Eigen::Index>(i));
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), xs.cols());
  model.dual_coef.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    model.support_vectors.row(static_cast<Eigen::Index>(k)) = xs.row(sv[k]);
    model.dual_coef(static_cast<Eigen::Index>(k)) =
        smo.alpha[static_cast<std::size_t>(sv[k])] * labels[static_cast<std::size_t>(sv[k])];
  }

  Eigen::VectorXd dec = model.decision(xs);
  std::vector<int> y01(n);
  for (std::size_t i = 0; i < n; ++i) y01[i] = labels[i] > 0 ? 1 : 0;
  model.platt = fit_platt({dec.data(), n}, y01);
  return model;
}

}  // namespace opms::models
