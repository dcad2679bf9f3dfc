#ifndef OPMS_MODELS_SVM_H_
#define OPMS_MODELS_SVM_H_

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "opms/models/config.h"
#include "opms/models/scaler.h"
#include "opms/telemetry/dataset.h"

namespace opms::models {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

// Gram matrix K(a_i, b_j) computed through squared distances.
Eigen::MatrixXd rbf_gram(const RowMatrix& a, const RowMatrix& b, double gamma);

struct SmoResult {
  std::vector<double> alpha;
  double rho = 0.0;  // decision = sum_i alpha_i y_i K(x_i, x) - rho
  long iterations = 0;
  bool converged = false;
  // Maximal KKT violation m(alpha) - M(alpha) at exit.
  double kkt_gap = 0.0;
};

// Solves the C-SVC dual
//   min 1/2 a'Qa - e'a  s.t.  0 <= a_i <= C,  y'a = 0,  Q_ij = y_i y_j K_ij
// with second-order working-set selection. `kernel(i, j)` returns K_ij;
// rows are cached lazily. `labels` are +1 / -1.
SmoResult solve_smo(std::size_t n, const std::function<double(std::size_t, std::size_t)>& kernel,
                    std::span<const int> labels, double c, double tolerance,
                    long max_iterations);

struct PlattScaling {
  double a = 0.0;
  double b = 0.0;
  // P(attack | f) = 1 / (1 + exp(a f + b))
  double probability(double decision) const;
};

// Newton fit with backtracking on smoothed targets; `labels` are 0 / 1.
PlattScaling fit_platt(std::span<const double> decision, std::span<const int> labels);

struct SvmModel {
  StandardScaler scaler;
  double gamma = 0.0;
  RowMatrix support_vectors;     // standardized
  Eigen::VectorXd dual_coef;     // alpha_i * y_i
  double rho = 0.0;
  PlattScaling platt;
  bool converged = true;
  long iterations = 0;

  // Decision values for standardized rows.
  Eigen::VectorXd decision(const RowMatrix& scaled) const;
};

SvmModel train_svm(const RowMatrix& x, std::span<const double> y, const SvmConfig& cfg);

}  // namespace opms::models

#endif  // OPMS_MODELS_SVM_H_
