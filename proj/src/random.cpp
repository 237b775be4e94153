#include "emvar/random.hpp"

#include "emvar/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace emvar {

RngStream::RngStream(std::uint64_t seed, StreamId id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(id.chain), static_cast<std::uint32_t>(id.chain >> 32),
                    static_cast<std::uint32_t>(id.sweep), static_cast<std::uint32_t>(id.sweep >> 32),
                    static_cast<std::uint32_t>(id.block), static_cast<std::uint32_t>(id.block >> 32)};
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::exponential(double rate) { return -std::log(uniform()) / rate; }

double RngStream::gamma(double shape, double rate) {
  std::gamma_distribution<double> dist(shape, 1.0);
  return dist(engine_) / rate;
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw ValidationError("gamma parameters must be positive");
  }
  return rng.gamma(shape, rate);
}

double sample_inverse_gamma(double shape, double scale, RngStream& rng) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw ValidationError("inverse gamma parameters must be positive (shape=" +
                          std::to_string(shape) + ", scale=" + std::to_string(scale) + ")");
  }
  return 1.0 / rng.gamma(shape, scale);
}

double sample_gamma_lower_truncated(double shape, double rate, double lower, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw ValidationError("gamma parameters must be positive");
  if (!(lower > 0.0)) return rng.gamma(shape, rate);
  // Work on the unit-rate scale: X ~ Gamma(shape, 1), X >= t.
  const double t = lower * rate;
  if (t < shape) {
    for (int attempt = 0; attempt < 32; ++attempt) {
      const double x = rng.gamma(shape, 1.0);
      if (x >= t) return x / rate;
    }
  }
  // Shifted exponential proposal t + Exp(lam); exact accept-reject.
  if (shape <= 1.0) {
    for (;;) {
      const double x = t + rng.exponential(1.0);
      if (std::log(rng.uniform()) <= (shape - 1.0) * std::log(x / t)) return x / rate;
    }
  }
  const double lam = (t - shape + std::sqrt((t - shape) * (t - shape) + 4.0 * t)) / (2.0 * t);
  const double peak = std::max(t, (shape - 1.0) / (1.0 - lam));
  const auto log_ratio = [&](double x) { return (shape - 1.0) * std::log(x) - (1.0 - lam) * x; };
  const double log_max = log_ratio(peak);
  for (;;) {
    const double x = t + rng.exponential(lam);
    if (std::log(rng.uniform()) <= log_ratio(x) - log_max) return x / rate;
  }
}

double sample_inverse_gamma_bounded(double shape, double scale, double upper, RngStream& rng) {
  if (!std::isfinite(upper)) return sample_inverse_gamma(shape, scale, rng);
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw ValidationError("inverse gamma parameters must be positive");
  }
  return 1.0 / sample_gamma_lower_truncated(shape, scale, 1.0 / upper, rng);
}

double sample_beta(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("beta shapes must be positive");
  const double x = rng.gamma(a, 1.0);
  const double y = rng.gamma(b, 1.0);
  double out = x / (x + y);
  // Keep strictly inside (0, 1).
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (out <= 0.0) out = eps;
  if (out >= 1.0) out = 1.0 - eps;
  return out;
}

double sample_half_cauchy(double upper, RngStream& rng) {
  const double top = std::isfinite(upper) ? std::atan(upper) : std::numbers::pi / 2.0;
  return std::tan(rng.uniform() * top);
}

// ---------------------------------------------------------------------------
// Generalized inverse Gaussian: ratio-of-uniforms sampler of Hoermann and
// Leydold (2014) on the two-parameter form x^{l-1} exp(-w/2 (x + 1/x)),
// scaled by sqrt(chi/psi). Negative lambda uses the reciprocal of the
// positive-lambda variate.

namespace {

double gig_mode(double lambda, double omega) {
  if (lambda >= 1.0) {
    return (std::sqrt((lambda - 1.0) * (lambda - 1.0) + omega * omega) + (lambda - 1.0)) / omega;
  }
  return omega / (std::sqrt((1.0 - lambda) * (1.0 - lambda) + omega * omega) + (1.0 - lambda));
}

double gig_rou_noshift(double lambda, double omega, RngStream& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);
  const double ym = ((lambda + 1.0) + std::sqrt((lambda + 1.0) * (lambda + 1.0) + omega * omega)) / omega;
  const double um = std::exp(0.5 * (lambda + 1.0) * std::log(ym) - s * (ym + 1.0 / ym) - nc);
  for (;;) {
    const double u = um * rng.uniform();
    const double v = rng.uniform();
    const double x = u / v;
    if (std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

double gig_rou_shift(double lambda, double omega, RngStream& rng) {
  const double t = 0.5 * (lambda - 1.0);
  const double s = 0.25 * omega;
  const double xm = gig_mode(lambda, omega);
  const double nc = t * std::log(xm) - s * (xm + 1.0 / xm);

  // Roots of the cubic bounding the minimal rectangle (Cardano).
  const double a = -(2.0 * (lambda + 1.0) / omega + xm);
  const double b = (2.0 * (lambda - 1.0) * xm / omega - 1.0);
  const double c = xm;
  const double p = b - a * a / 3.0;
  const double q = (2.0 * a * a * a) / 27.0 - (a * b) / 3.0 + c;
  const double fi = std::acos(-q / (2.0 * std::sqrt(-(p * p * p) / 27.0)));
  const double fak = 2.0 * std::sqrt(-p / 3.0);
  const double y1 = fak * std::cos(fi / 3.0) - a / 3.0;
  const double y2 = fak * std::cos(fi / 3.0 + 4.0 / 3.0 * std::numbers::pi) - a / 3.0;
  const double uplus = (y1 - xm) * std::exp(t * std::log(y1) - s * (y1 + 1.0 / y1) - nc);
  const double uminus = (y2 - xm) * std::exp(t * std::log(y2) - s * (y2 + 1.0 / y2) - nc);

  for (;;) {
    const double u = uminus + rng.uniform() * (uplus - uminus);
    const double v = rng.uniform();
    const double x = u / v + xm;
    if (x > 0.0 && std::log(v) <= t * std::log(x) - s * (x + 1.0 / x) - nc) return x;
  }
}

// Small omega, 0 <= lambda < 1: piecewise hat (constant, power, exponential).
double gig_small_omega(double lambda, double omega, RngStream& rng) {
  const double xm = gig_mode(lambda, omega);
  const double x0 = omega / (1.0 - lambda);
  const double k0 = std::exp((lambda - 1.0) * std::log(xm) - 0.5 * omega * (xm + 1.0 / xm));
  const double a0 = k0 * x0;
  double k1, a1, k2, a2;
  if (x0 >= 2.0 / omega) {
    k1 = 0.0;
    a1 = 0.0;
    k2 = std::pow(x0, lambda - 1.0);
    a2 = k2 * 2.0 * std::exp(-omega * x0 / 2.0) / omega;
  } else {
    k1 = std::exp(-omega);
    a1 = (lambda == 0.0) ? k1 * std::log(2.0 / (omega * omega))
                         : k1 / lambda * (std::pow(2.0 / omega, lambda) - std::pow(x0, lambda));
    k2 = std::pow(2.0 / omega, lambda - 1.0);
    a2 = k2 * 2.0 * std::exp(-1.0) / omega;
  }
  const double total = a0 + a1 + a2;
  for (;;) {
    double v = total * rng.uniform();
    double x, hx;
    if (v <= a0) {
      x = x0 * v / a0;
      hx = k0;
    } else if ((v -= a0) <= a1) {
      if (lambda == 0.0) {
        x = omega * std::exp(std::exp(omega) * v);
        hx = k1 / x;
      } else {
        x = std::pow(std::pow(x0, lambda) + (lambda / k1 * v), 1.0 / lambda);
        hx = k1 * std::pow(x, lambda - 1.0);
      }
    } else {
      v -= a1;
      const double lo = (x0 > 2.0 / omega) ? x0 : 2.0 / omega;
      x = -2.0 / omega * std::log(std::exp(-omega / 2.0 * lo) - omega / (2.0 * k2) * v);
      hx = k2 * std::exp(-omega / 2.0 * x);
    }
    const double u = rng.uniform() * hx;
    if (std::log(u) <= (lambda - 1.0) * std::log(x) - omega / 2.0 * (x + 1.0 / x)) return x;
  }
}

}  // namespace

double sample_gig(double lambda, double chi, double psi, RngStream& rng) {
  if (!std::isfinite(lambda) || !std::isfinite(chi) || !std::isfinite(psi) || chi < 0.0 ||
      psi < 0.0 || (chi == 0.0 && psi == 0.0) || (chi == 0.0 && lambda <= 0.0) ||
      (psi == 0.0 && lambda >= 0.0)) {
    throw ValidationError("GIG parameters outside the normalizable region (lambda=" +
                          std::to_string(lambda) + ", chi=" + std::to_string(chi) +
                          ", psi=" + std::to_string(psi) + ")");
  }
  if (chi == 0.0) return rng.gamma(lambda, psi / 2.0);
  if (psi == 0.0) return 1.0 / rng.gamma(-lambda, chi / 2.0);

  const double alpha = std::sqrt(chi / psi);
  const double omega = std::sqrt(chi * psi);
  const double l = std::abs(lambda);

  // Degenerate scale: the product chi*psi carries no usable information and
  // the density collapses onto its gamma / inverse-gamma limit.
  if (!(omega > 1e-150)) {
    if (lambda > 0.0) return rng.gamma(lambda, psi / 2.0);
    if (lambda < 0.0) return 1.0 / rng.gamma(-lambda, chi / 2.0);
  }

  double x;
  if (l > 2.0 || omega > 3.0) {
    x = gig_rou_shift(l, omega, rng);
  } else if (l >= 1.0 - 2.25 * omega * omega || omega > 0.2) {
    x = gig_rou_noshift(l, omega, rng);
  } else {
    x = gig_small_omega(l, omega, rng);
  }
  return lambda < 0.0 ? alpha / x : alpha * x;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd sample_gaussian_regression(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                           const Eigen::Ref<const Eigen::VectorXd>& y,
                                           const Eigen::Ref<const Eigen::VectorXd>& obs_var,
                                           const Eigen::Ref<const Eigen::VectorXd>& prior_var,
                                           RngStream& rng) {
  const Eigen::Index n = X.rows();
  const Eigen::Index q = X.cols();
  if (y.size() != n || obs_var.size() != n || prior_var.size() != q) {
    throw ValidationError("regression inputs have inconsistent dimensions");
  }
  if ((obs_var.array() <= 0.0).any() || (prior_var.array() <= 0.0).any()) {
    throw ValidationError("regression variances must be strictly positive");
  }

  const Eigen::VectorXd w = obs_var.cwiseInverse();
  Eigen::MatrixXd precision(q, q);
  precision.setZero();
  precision.selfadjointView<Eigen::Lower>().rankUpdate((X.transpose() * w.cwiseSqrt().asDiagonal()));
  precision.diagonal() += prior_var.cwiseInverse();
  precision.triangularView<Eigen::Upper>() = precision.transpose();
  const Eigen::VectorXd rhs = X.transpose() * (w.cwiseProduct(y));

  if (!precision.allFinite() || !rhs.allFinite()) {
    throw NumericalError("posterior precision is not finite");
  }
  const Eigen::VectorXd scale = precision.diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd equilibrated = scale.asDiagonal() * precision * scale.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(equilibrated);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("posterior precision is not positive definite");
  }
  const Eigen::VectorXd pivots = llt.matrixL().toDenseMatrix().diagonal();
  const double ratio = pivots.maxCoeff() / pivots.minCoeff();
  if (!(ratio * ratio < kConditionLimit)) {
    throw NumericalError("posterior precision ill-conditioned (estimate " +
                         std::to_string(ratio * ratio) + ")");
  }
  Eigen::VectorXd mean_scaled = llt.solve(scale.cwiseProduct(rhs));
  Eigen::VectorXd z(q);
  for (Eigen::Index i = 0; i < q; ++i) z[i] = rng.normal();
  llt.matrixU().solveInPlace(z);
  return scale.cwiseProduct(mean_scaled + z);
}

Eigen::VectorXd sample_mvn(const Eigen::Ref<const Eigen::VectorXd>& mean,
                           const Eigen::Ref<const Eigen::MatrixXd>& cov, RngStream& rng) {
  const Eigen::Index n = mean.size();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return mean + llt.matrixL() * z;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd values = eig.eigenvalues();
  const double top = std::max(values.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if (values.minCoeff() < -1e-9 * top) {
    throw NumericalError("covariance lost positive semidefiniteness (min eigenvalue " +
                         std::to_string(values.minCoeff()) + ")");
  }
  const Eigen::VectorXd root = values.cwiseMax(0.0).cwiseSqrt();
  return mean + eig.eigenvectors() * root.cwiseProduct(z);
}

}  // namespace emvar
