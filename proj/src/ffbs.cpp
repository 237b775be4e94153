#include "emvar/ffbs.hpp"

#include "emvar/errors.hpp"

#include <cmath>
#include <string>

namespace emvar {

namespace {

struct FilterPass {
  Eigen::MatrixXd mean;              // filtered means, T x r
  std::vector<Eigen::MatrixXd> cov;  // filtered covariances
};

FilterPass forward_filter(const FfbsProblem& p) {
  const Eigen::Index T = p.obs.size();
  const Eigen::Index r = p.load.cols();
  FilterPass out;
  out.mean.resize(T, r);
  out.cov.reserve(static_cast<std::size_t>(T));

  Eigen::VectorXd m = Eigen::VectorXd::Zero(r);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(r, r);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(r, r);
  for (Eigen::Index t = 0; t < T; ++t) {
    const Eigen::MatrixXd R = C + I;
    const Eigen::VectorXd l = p.load.row(t).transpose();
    const Eigen::VectorXd Rl = R * l;
    const double f = l.dot(Rl) + p.obs_var[t];
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw NumericalError("FFBS innovation variance not positive at t=" + std::to_string(t));
    }
    const Eigen::VectorXd gain = Rl / f;
    m = m + gain * (p.obs[t] - l.dot(m));
    if (p.obs_var[t] < 1e-8 * f) {
      // Joseph form keeps C positive semidefinite when the observation is
      // nearly noiseless.
      const Eigen::MatrixXd A = I - gain * l.transpose();
      C = A * R * A.transpose() + p.obs_var[t] * gain * gain.transpose();
    } else {
      C = R - Rl * Rl.transpose() / f;
    }
    C = 0.5 * (C + C.transpose());
    out.mean.row(t) = m.transpose();
    out.cov.push_back(C);
  }
  return out;
}

}  // namespace

void check_ffbs(const FfbsProblem& p) {
  const Eigen::Index T = p.obs.size();
  if (p.load.rows() != T || p.obs_var.size() != T) {
    throw ValidationError("FFBS inputs have inconsistent lengths");
  }
  if (p.load.cols() < 1) throw ValidationError("FFBS state dimension must be at least 1");
  if (!(p.obs_var.array() > 0.0).all()) {
    throw ValidationError("FFBS observation variances must be strictly positive");
  }
  if (!p.obs.allFinite() || !p.load.allFinite() || !p.obs_var.allFinite()) {
    throw NumericalError("FFBS inputs are not finite");
  }
}

Eigen::MatrixXd ffbs_sample(const FfbsProblem& p, RngStream& rng) {
  check_ffbs(p);
  const Eigen::Index T = p.obs.size();
  const Eigen::Index r = p.load.cols();
  const FilterPass f = forward_filter(p);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(r, r);

  Eigen::MatrixXd path(T, r);
  path.row(T - 1) = sample_mvn(f.mean.row(T - 1).transpose(), f.cov.back(), rng).transpose();
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    // With unit state noise, Cov(tau_t | tau_{t+1}) = I - (C_t + I)^{-1}.
    const Eigen::MatrixXd inv = (f.cov[t] + I).llt().solve(I);
    Eigen::MatrixXd gain = I - inv;
    gain = 0.5 * (gain + gain.transpose());
    const Eigen::VectorXd m = f.mean.row(t).transpose();
    const Eigen::VectorXd mean = m + gain * (path.row(t + 1).transpose() - m);
    path.row(t) = sample_mvn(mean, gain, rng).transpose();
  }
  return path;
}

SmoothedStates kalman_smooth(const FfbsProblem& p) {
  check_ffbs(p);
  const Eigen::Index T = p.obs.size();
  const Eigen::Index r = p.load.cols();
  const FilterPass f = forward_filter(p);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(r, r);

  SmoothedStates s;
  s.mean.resize(T, r);
  s.cov.resize(static_cast<std::size_t>(T));
  s.mean.row(T - 1) = f.mean.row(T - 1);
  s.cov[T - 1] = f.cov.back();
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const Eigen::MatrixXd R = f.cov[t] + I;
    const Eigen::MatrixXd J = f.cov[t] * R.llt().solve(I);
    s.mean.row(t) = f.mean.row(t) + (J * (s.mean.row(t + 1) - f.mean.row(t)).transpose()).transpose();
    Eigen::MatrixXd C = f.cov[t] + J * (s.cov[t + 1] - R) * J.transpose();
    s.cov[t] = 0.5 * (C + C.transpose());
  }
  return s;
}

}  // namespace emvar
