#include "emvar/stochvol.hpp"

#include "emvar/errors.hpp"

#include <cmath>
#include <limits>

namespace emvar {

namespace {

constexpr int kPhiRetries = 100;

double log_phi_prior(double phi, const SvPrior& prior) {
  const double u = 0.5 * (phi + 1.0);
  return (prior.phi_a - 1.0) * std::log(u) + (prior.phi_b - 1.0) * std::log1p(-u);
}

double log_sigma2_prior(double s2, const SvPrior& prior) {
  return (prior.sigma2_shape - 1.0) * std::log(s2) - prior.sigma2_rate * s2;
}

// Symmetric tridiagonal precision with diagonal `diag` and off-diagonal `off`;
// returns a draw from N(Q^{-1} b, Q^{-1}).
Eigen::VectorXd sample_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                   const Eigen::VectorXd& b, RngStream& rng) {
  const Eigen::Index T = diag.size();
  Eigen::VectorXd l_diag(T), l_off(T > 1 ? T - 1 : 0);
  l_diag[0] = std::sqrt(diag[0]);
  for (Eigen::Index t = 1; t < T; ++t) {
    l_off[t - 1] = off[t - 1] / l_diag[t - 1];
    const double piv = diag[t] - l_off[t - 1] * l_off[t - 1];
    if (!(piv > 0.0)) throw NumericalError("volatility precision not positive definite");
    l_diag[t] = std::sqrt(piv);
  }
  // Forward solve L w = b, then back solve L' x = w + z.
  Eigen::VectorXd w(T);
  w[0] = b[0] / l_diag[0];
  for (Eigen::Index t = 1; t < T; ++t) w[t] = (b[t] - l_off[t - 1] * w[t - 1]) / l_diag[t];
  for (Eigen::Index t = 0; t < T; ++t) w[t] += rng.normal();
  Eigen::VectorXd x(T);
  x[T - 1] = w[T - 1] / l_diag[T - 1];
  for (Eigen::Index t = T - 2; t >= 0; --t) x[t] = (w[t] - l_off[t] * x[t + 1]) / l_diag[t];
  return x;
}

void centered_parameter_step(const Eigen::VectorXd& h, SvDraw& out, const SvPrior& prior,
                             RngStream& rng) {
  const Eigen::Index T = h.size();
  SvParams& p = out.params;

  {
    const NormalParams c = sv_mu_conditional(h, p.phi, p.sigma2, prior);
    p.mu = c.mean + std::sqrt(c.var) * rng.normal();
  }

  const Eigen::VectorXd d = h.array() - p.mu;
  {
    // Independence proposal from the t >= 2 autoregression; retries sample
    // from the proposal restricted to (-1, 1), whose normalizing constant
    // cancels in the acceptance ratio.
    const double sxx = d.head(T - 1).squaredNorm();
    const double sxy = d.head(T - 1).dot(d.tail(T - 1));
    const double prop_mean = sxy / sxx;
    const double prop_sd = std::sqrt(p.sigma2 / sxx);
    double proposal = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < kPhiRetries; ++i) {
      const double cand = prop_mean + prop_sd * rng.normal();
      if (std::abs(cand) < 1.0) {
        proposal = cand;
        break;
      }
    }
    if (std::isfinite(proposal)) {
      const auto log_target_rest = [&](double phi) {
        return log_phi_prior(phi, prior) + 0.5 * std::log1p(-phi * phi) -
               (1.0 - phi * phi) * d[0] * d[0] / (2.0 * p.sigma2);
      };
      if (std::log(rng.uniform()) < log_target_rest(proposal) - log_target_rest(p.phi)) {
        p.phi = proposal;
        out.phi_accepted = true;
      }
    }
  }

  {
    double ss = (1.0 - p.phi * p.phi) * d[0] * d[0];
    for (Eigen::Index t = 1; t < T; ++t) {
      const double e = d[t] - p.phi * d[t - 1];
      ss += e * e;
    }
    const double proposal = sample_inverse_gamma(0.5 * static_cast<double>(T) - 1.0, 0.5 * ss, rng);
    if (std::log(rng.uniform()) < log_sigma2_prior(proposal, prior) - log_sigma2_prior(p.sigma2, prior)) {
      p.sigma2 = proposal;
      out.sigma2_accepted = true;
    }
  }
}

void check_sv(const SvProblem& p) {
  const Eigen::Index T = p.resid.size();
  if (T < 3) throw ValidationError("volatility block needs at least 3 observations");
  if (p.log_vol.size() != T) throw ValidationError("log-volatility path has the wrong length");
  if (!(std::abs(p.params.phi) < 1.0) || !(p.params.sigma2 > 0.0)) {
    throw ValidationError("volatility parameters need |phi| < 1 and sigma2 > 0");
  }
  if (!p.resid.allFinite() || !p.log_vol.allFinite()) {
    throw NumericalError("volatility block received non-finite input");
  }
}

}  // namespace

MixtureMoments mixture_moments() {
  MixtureMoments m;
  double second = 0.0;
  for (std::size_t k = 0; k < sv_mixture::weight.size(); ++k) {
    m.mean += sv_mixture::weight[k] * sv_mixture::mean[k];
    second += sv_mixture::weight[k] * (sv_mixture::variance[k] + sv_mixture::mean[k] * sv_mixture::mean[k]);
  }
  m.variance = second - m.mean * m.mean;
  return m;
}

NormalParams sv_mu_conditional(const Eigen::Ref<const Eigen::VectorXd>& h, double phi,
                               double sigma2, const SvPrior& prior) {
  const Eigen::Index T = h.size();
  double precision = 1.0 / prior.mu_var + (1.0 - phi * phi) / sigma2;
  double weighted = prior.mu_mean / prior.mu_var + (1.0 - phi * phi) * h[0] / sigma2;
  for (Eigen::Index t = 1; t < T; ++t) {
    precision += (1.0 - phi) * (1.0 - phi) / sigma2;
    weighted += (1.0 - phi) * (h[t] - phi * h[t - 1]) / sigma2;
  }
  return {weighted / precision, 1.0 / precision};
}

SvDraw sample_sv_params(const SvProblem& problem, RngStream& rng) {
  check_sv(problem);
  SvDraw out;
  out.log_vol = problem.log_vol;
  out.params = problem.params;
  centered_parameter_step(out.log_vol, out, problem.prior, rng);
  return out;
}

SvDraw sample_sv_block(const SvProblem& problem, RngStream& rng) {
  check_sv(problem);
  const Eigen::Index T = problem.resid.size();
  const SvPrior& prior = problem.prior;
  SvDraw out;
  out.params = problem.params;

  Eigen::VectorXd ystar(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    ystar[t] = std::log(problem.resid[t] * problem.resid[t] + kSvOffset);
  }

  // Mixture indicators.
  constexpr std::size_t n_comp = sv_mixture::weight.size();
  Eigen::VectorXd comp_mean(T), comp_var(T);
  std::array<double, n_comp> logw{};
  for (Eigen::Index t = 0; t < T; ++t) {
    const double e = ystar[t] - problem.log_vol[t];
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_comp; ++k) {
      const double dev = e - sv_mixture::mean[k];
      logw[k] = std::log(sv_mixture::weight[k]) - 0.5 * std::log(sv_mixture::variance[k]) -
                0.5 * dev * dev / sv_mixture::variance[k];
      top = std::max(top, logw[k]);
    }
    double total = 0.0;
    for (auto& w : logw) total += (w = std::exp(w - top));
    double u = rng.uniform() * total;
    std::size_t pick = n_comp - 1;
    for (std::size_t k = 0; k < n_comp; ++k) {
      if (u < logw[k]) {
        pick = k;
        break;
      }
      u -= logw[k];
    }
    comp_mean[t] = sv_mixture::mean[pick];
    comp_var[t] = sv_mixture::variance[pick];
  }

  // Log-volatility path given indicators.
  {
    const SvParams& p = out.params;
    const double inv_s2 = 1.0 / p.sigma2;
    Eigen::VectorXd diag(T), off(T - 1), b(T);
    for (Eigen::Index t = 0; t < T; ++t) {
      const bool edge = (t == 0 || t == T - 1);
      diag[t] = (edge ? 1.0 : 1.0 + p.phi * p.phi) * inv_s2;
    }
    off.setConstant(-p.phi * inv_s2);
    // Prior mean mu * 1 times prior precision.
    for (Eigen::Index t = 0; t < T; ++t) {
      const bool edge = (t == 0 || t == T - 1);
      b[t] = p.mu * inv_s2 * (edge ? 1.0 - p.phi : (1.0 - p.phi) * (1.0 - p.phi));
    }
    diag.array() += comp_var.array().inverse();
    b.array() += (ystar - comp_mean).array() / comp_var.array();
    out.log_vol = sample_tridiagonal(diag, off, b, rng);
  }

  centered_parameter_step(out.log_vol, out, prior, rng);

  // Interweaving: re-draw (mu, sigma) given the standardized path. Valid when
  // the sigma2 prior is Gamma(1/2, rate), i.e. sigma ~ N(0, 1 / (2 rate)).
  if (prior.sigma2_shape == 0.5) {
    SvParams& p = out.params;
    const double sigma = std::sqrt(p.sigma2);
    const Eigen::VectorXd standardized = (out.log_vol.array() - p.mu) / sigma;
    Eigen::MatrixXd design(T, 2);
    design.col(0).setOnes();
    design.col(1) = standardized;
    const Eigen::VectorXd response = ystar - comp_mean - Eigen::VectorXd::Constant(T, prior.mu_mean);
    const Eigen::Vector2d prior_var(prior.mu_var, 0.5 / prior.sigma2_rate);
    const Eigen::VectorXd coef = sample_gaussian_regression(design, response, comp_var, prior_var, rng);
    p.mu = prior.mu_mean + coef[0];
    p.sigma2 = coef[1] * coef[1];
    out.log_vol = (p.mu + coef[1] * standardized.array()).matrix();
  }
  return out;
}

SvDraw draw_sv_prior(const SvPrior& prior, Eigen::Index T, RngStream& rng) {
  SvDraw out;
  out.params.mu = prior.mu_mean + std::sqrt(prior.mu_var) * rng.normal();
  out.params.phi = 2.0 * sample_beta(prior.phi_a, prior.phi_b, rng) - 1.0;
  out.params.sigma2 = sample_gamma(prior.sigma2_shape, prior.sigma2_rate, rng);
  const SvParams& p = out.params;
  out.log_vol.resize(T);
  const double sd = std::sqrt(p.sigma2);
  out.log_vol[0] = p.mu + sd / std::sqrt(1.0 - p.phi * p.phi) * rng.normal();
  for (Eigen::Index t = 1; t < T; ++t) {
    out.log_vol[t] = p.mu + p.phi * (out.log_vol[t - 1] - p.mu) + sd * rng.normal();
  }
  return out;
}

}  // namespace emvar
