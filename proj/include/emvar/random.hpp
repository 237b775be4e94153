#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace emvar {

// Identifies an independent stream below a user seed.
struct StreamId {
  std::uint64_t chain = 0;
  std::uint64_t sweep = 0;
  std::uint64_t block = 0;
};

// Seedable random stream. Identical (seed, id) pairs give identical sequences.
// Not thread-safe: one stream per thread of work.
class RngStream {
 public:
  using Engine = std::mt19937_64;

  explicit RngStream(std::uint64_t seed, StreamId id = {});

  double uniform();  // open interval (0, 1)
  double normal();
  double exponential(double rate);
  // Gamma with shape/rate parameterization.
  double gamma(double shape, double rate);
  std::uint64_t bits() { return engine_(); }

  Engine& engine() { return engine_; }

 private:
  Engine engine_;
  std::normal_distribution<double> normal_;
};

// Density proportional to x^{lambda-1} exp(-(chi/x + psi*x)/2).
// Requires chi, psi >= 0, not both zero, lambda > 0 when chi == 0 and
// lambda < 0 when psi == 0. Throws ValidationError otherwise.
double sample_gig(double lambda, double chi, double psi, RngStream& rng);

// Density proportional to x^{-shape-1} exp(-scale/x).
double sample_inverse_gamma(double shape, double scale, RngStream& rng);

// Inverse gamma restricted to x <= upper.
double sample_inverse_gamma_bounded(double shape, double scale, double upper, RngStream& rng);

// Gamma(shape, rate) restricted to x >= lower.
double sample_gamma_lower_truncated(double shape, double rate, double lower, RngStream& rng);

double sample_gamma(double shape, double rate, RngStream& rng);

double sample_beta(double a, double b, RngStream& rng);

// Standard half-Cauchy truncated to (0, upper]; upper may be infinite.
double sample_half_cauchy(double upper, RngStream& rng);

// Draw from N(mu*, V*) with V* = (X' W X + diag(prior_var)^{-1})^{-1},
// W = diag(obs_var)^{-1}, mu* = V* X' W y. Prior mean is zero.
//
// The precision is equilibrated to unit diagonal before factorization; a
// condition estimate above 1e12 on the equilibrated matrix raises
// NumericalError rather than regularizing further.
Eigen::VectorXd sample_gaussian_regression(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                           const Eigen::Ref<const Eigen::VectorXd>& y,
                                           const Eigen::Ref<const Eigen::VectorXd>& obs_var,
                                           const Eigen::Ref<const Eigen::VectorXd>& prior_var,
                                           RngStream& rng);

inline constexpr double kConditionLimit = 1e12;

// Draw from N(mean, cov) for a symmetric positive semidefinite cov. Small
// negative eigenvalues (relative 1e-9) are clipped; larger ones throw
// NumericalError.
Eigen::VectorXd sample_mvn(const Eigen::Ref<const Eigen::VectorXd>& mean,
                           const Eigen::Ref<const Eigen::MatrixXd>& cov, RngStream& rng);

}  // namespace emvar
