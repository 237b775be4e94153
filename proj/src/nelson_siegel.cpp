#include "emvar/nelson_siegel.hpp"

#include "emvar/errors.hpp"

#include <algorithm>

namespace emvar {

void check_ns_config(const NsConfig& c) {
  if (!(c.alpha > 0.0) || !std::isfinite(c.alpha)) throw ValidationError("NS decay alpha must be positive");
  if (c.maturities.size() < 3) throw ValidationError("Nelson-Siegel needs at least 3 maturities");
  std::vector<double> sorted = c.maturities;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(sorted[i] > 0.0)) throw ValidationError("maturities must be positive");
    if (i > 0 && sorted[i] == sorted[i - 1]) throw ValidationError("maturities must be distinct");
  }
}

Eigen::MatrixXd ns_loading_matrix(const NsConfig& c) {
  check_ns_config(c);
  Eigen::MatrixXd L(static_cast<Eigen::Index>(c.maturities.size()), 3);
  for (std::size_t i = 0; i < c.maturities.size(); ++i) {
    L.row(static_cast<Eigen::Index>(i)) = ns_loadings(c.maturities[i], c.alpha).transpose();
  }
  return L;
}

Eigen::MatrixXd extract_factors(const Eigen::MatrixXd& yields, const NsConfig& c) {
  const Eigen::MatrixXd L = ns_loading_matrix(c);
  if (yields.cols() != L.rows()) {
    throw ValidationError("yield panel has " + std::to_string(yields.cols()) + " columns but " +
                          std::to_string(L.rows()) + " maturities are declared");
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(L);
  if (qr.rank() < 3) throw NumericalError("Nelson-Siegel loading matrix is rank deficient");
  return qr.solve(yields.transpose()).transpose();
}

Eigen::MatrixXd reconstruct_yields(const Eigen::MatrixXd& factors, const NsConfig& c) {
  if (factors.cols() != 3) throw ValidationError("factor panel must have 3 columns");
  return factors * ns_loading_matrix(c).transpose();
}

}  // namespace emvar
