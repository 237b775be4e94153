#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace emvar {

struct NsConfig {
  double alpha = 0.7308;  // 12 x 0.0609
  std::vector<double> maturities{1.0, 3.0, 5.0, 7.0, 10.0, 15.0};
};

void check_ns_config(const NsConfig& config);

// (1, (1 - e^{-x}) / x, (1 - e^{-x}) / x - e^{-x}) with x = theta * alpha.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> ns_loadings(Scalar theta, Scalar alpha) {
  using std::exp;
  using std::expm1;
  const Scalar x = theta * alpha;
  Scalar slope;
  if (x < Scalar(1e-8)) {
    slope = Scalar(1) - x / Scalar(2) + x * x / Scalar(6);
  } else {
    slope = -expm1(-x) / x;
  }
  Eigen::Matrix<Scalar, 3, 1> out;
  out << Scalar(1), slope, slope - exp(-x);
  return out;
}

// n_mat x 3 loading matrix.
Eigen::MatrixXd ns_loading_matrix(const NsConfig& config);

// Per-t least squares of the yield cross-section on the loadings; T x 3
// factors (level, slope, curvature).
Eigen::MatrixXd extract_factors(const Eigen::MatrixXd& yields, const NsConfig& config);

Eigen::MatrixXd reconstruct_yields(const Eigen::MatrixXd& factors, const NsConfig& config);

}  // namespace emvar
