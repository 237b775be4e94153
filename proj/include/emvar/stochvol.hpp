#pragma once

#include "emvar/model.hpp"
#include "emvar/random.hpp"

#include <Eigen/Dense>

#include <array>

namespace emvar {

// h_t = mu + phi (h_{t-1} - mu) + sigma nu_t, h_1 ~ N(mu, sigma2 / (1 - phi^2)).
struct SvParams {
  double mu = 0.0;
  double phi = 0.9;
  double sigma2 = 0.1;
};

struct SvProblem {
  Eigen::VectorXd resid;    // T residuals
  Eigen::VectorXd log_vol;  // current T log-volatilities
  SvParams params;
  SvPrior prior;
};

struct SvDraw {
  Eigen::VectorXd log_vol;
  SvParams params;
  bool phi_accepted = false;
  bool sigma2_accepted = false;
};

// Ten-component normal mixture approximating log chi^2_1 (Omori, Chib,
// Shephard and Nakajima 2007).
namespace sv_mixture {
inline constexpr std::array<double, 10> weight{0.00609, 0.04775, 0.13057, 0.20674, 0.22715,
                                               0.18842, 0.12047, 0.05591, 0.01575, 0.00115};
inline constexpr std::array<double, 10> mean{1.92677, 1.34744,  0.73504,  0.02266,  -0.85173,
                                             -1.97278, -3.46788, -5.55246, -8.68384, -14.65000};
inline constexpr std::array<double, 10> variance{0.11265, 0.17788, 0.26768, 0.40611, 0.62699,
                                                 0.98583, 1.57469, 2.54498, 4.16591, 7.33342};
}  // namespace sv_mixture

inline constexpr double kSvOffset = 1e-10;

struct MixtureMoments {
  double mean = 0.0;
  double variance = 0.0;
};
MixtureMoments mixture_moments();

struct NormalParams {
  double mean = 0.0;
  double var = 0.0;
};

// Conditional of mu given a log-volatility path, phi and sigma2.
NormalParams sv_mu_conditional(const Eigen::Ref<const Eigen::VectorXd>& h, double phi,
                               double sigma2, const SvPrior& prior);

// One update of the volatility block: mixture indicators, h by a banded
// precision sampler, centered updates of (mu, phi, sigma2), then an
// interweaving step re-drawing (mu, sigma) in the non-centered
// parameterization.
SvDraw sample_sv_block(const SvProblem& problem, RngStream& rng);

// Parameter-only update (h held fixed): mu, phi, sigma2 in the centered form.
SvDraw sample_sv_params(const SvProblem& problem, RngStream& rng);

// Draws (mu, phi, sigma2) from the prior and a path of length T.
SvDraw draw_sv_prior(const SvPrior& prior, Eigen::Index T, RngStream& rng);

}  // namespace emvar
