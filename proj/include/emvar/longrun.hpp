#pragma once

#include "emvar/errors.hpp"
#include "emvar/gibbs.hpp"

#include <Eigen/Dense>

#include <vector>

namespace emvar {

struct CompanionSystem {
  Eigen::MatrixXd B;      // K x K
  Eigen::MatrixXd J;      // M x K, (I_M | 0)
  Eigen::MatrixXd Omega;  // K x K, Sigma in the upper-left block
};

// beta holds the slope coefficients equation by equation (k = M K entries,
// equation i at [i K, (i + 1) K) in the lag order of the regressors).
CompanionSystem companion_form(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Sigma, Index M,
                               Index P);

class NonstationaryError : public NumericalError {
 public:
  NonstationaryError(const std::string& what, Index t) : NumericalError(what), t_(t) {}
  Index t() const { return t_; }

 private:
  Index t_;
};

double spectral_radius(const Eigen::MatrixXd& B);

// J (I - B)^{-1} Omega (I - B)^{-T} J'. Throws NonstationaryError (tagged with
// t) when the spectral radius of B is at least one.
Eigen::MatrixXd spectral_density_zero(const CompanionSystem& sys, Index t = -1);

// phi_ij = Phi_ij / Phi_jj; the diagonal is set to NaN.
Eigen::MatrixXd longrun_measure(const Eigen::MatrixXd& Phi);

// Type-7 sample quantile of unsorted values.
double quantile(std::vector<double> values, double p);

struct LongrunRow {
  Index t = 0;
  Index i = 0;
  Index j = 0;
  double median = 0.0;  // NaN when every draw was dropped at t
  double q16 = 0.0;
  double q84 = 0.0;
  Index n_dropped = 0;
};

// Reduced-form slope coefficients and Sigma_t = Q_t H_t Q_t' at (draw, t).
struct ReducedForm {
  Eigen::VectorXd beta;
  Eigen::MatrixXd Sigma;
};
ReducedForm reduced_form_at(const PosteriorDraws& draws, Index draw, Index t);

// Rows ordered by t, then i, then j (i != j); T M (M - 1) rows.
std::vector<LongrunRow> longrun_paths(const PosteriorDraws& draws);

}  // namespace emvar
