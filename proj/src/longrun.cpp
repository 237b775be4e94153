#include "emvar/longrun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace emvar {

CompanionSystem companion_form(const Eigen::VectorXd& beta, const Eigen::MatrixXd& Sigma, Index M,
                               Index P) {
  const Index K = M * P;
  if (beta.size() != M * K) {
    throw ValidationError("companion form expects " + std::to_string(M * K) + " slope coefficients, got " +
                          std::to_string(beta.size()));
  }
  if (Sigma.rows() != M || Sigma.cols() != M) throw ValidationError("Sigma must be M x M");
  CompanionSystem sys;
  sys.B = Eigen::MatrixXd::Zero(K, K);
  sys.B.topRows(M) = beta.reshaped(K, M).transpose();
  if (K > M) sys.B.bottomLeftCorner(K - M, K - M).setIdentity();
  sys.J = Eigen::MatrixXd::Zero(M, K);
  sys.J.leftCols(M).setIdentity();
  sys.Omega = Eigen::MatrixXd::Zero(K, K);
  sys.Omega.topLeftCorner(M, M) = Sigma;
  return sys;
}

double spectral_radius(const Eigen::MatrixXd& B) {
  if (B.size() == 0) return 0.0;
  return Eigen::EigenSolver<Eigen::MatrixXd>(B, false).eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd spectral_density_zero(const CompanionSystem& sys, Index t) {
  const double rho = spectral_radius(sys.B);
  if (!(rho < 1.0)) {
    throw NonstationaryError("companion matrix has spectral radius " + std::to_string(rho) +
                                 (t >= 0 ? " at t=" + std::to_string(t) : std::string()),
                             t);
  }
  const Index K = sys.B.rows();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu((Eigen::MatrixXd::Identity(K, K) - sys.B).transpose());
  // J (I - B)^{-1}, solved through the transpose.
  const Eigen::MatrixXd G = lu.solve(sys.J.transpose()).transpose();
  const Eigen::MatrixXd Phi = G * sys.Omega * G.transpose();
  return 0.5 * (Phi + Phi.transpose());
}

Eigen::MatrixXd longrun_measure(const Eigen::MatrixXd& Phi) {
  const Index M = Phi.rows();
  if (Phi.cols() != M) throw ValidationError("Phi must be square");
  for (Index j = 0; j < M; ++j) {
    if (!(Phi(j, j) > 0.0)) throw NumericalError("Phi has a nonpositive diagonal entry");
  }
  Eigen::MatrixXd out(M, M);
  for (Index j = 0; j < M; ++j) {
    out.col(j) = Phi.col(j) / Phi(j, j);
    out(j, j) = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ReducedForm reduced_form_at(const PosteriorDraws& draws, Index draw, Index t) {
  const auto& d = draws.dims;
  ReducedForm out;
  out.beta.resize(d.M * d.K);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(d.M, d.M);
  Eigen::VectorXd H(d.M);
  for (Index j = 0; j < d.M; ++j) {
    const EquationDraws& e = draws.eq[j];
    const Index v = d.v[j];
    for (Index i = 0; i < v; ++i) {
      const double c = e.gamma(draw, i) + e.tvp(draw, i * d.T + t);
      if (i < d.K) out.beta[j * d.K + i] = c;
      else Q(j, i - d.K) = c;
    }
    H[j] = std::exp(e.log_vol(draw, t));
  }
  out.Sigma = Q * H.asDiagonal() * Q.transpose();
  return out;
}

std::vector<LongrunRow> longrun_paths(const PosteriorDraws& draws) {
  const auto& d = draws.dims;
  const Index M = d.M;
  std::vector<LongrunRow> rows;
  rows.reserve(static_cast<std::size_t>(d.T * M * (M - 1)));
  std::vector<std::vector<double>> cell(static_cast<std::size_t>(M * M));
  for (Index t = 0; t < d.T; ++t) {
    for (auto& c : cell) c.clear();
    Index dropped = 0;
    for (Index s = 0; s < draws.count; ++s) {
      const ReducedForm rf = reduced_form_at(draws, s, t);
      const CompanionSystem sys = companion_form(rf.beta, rf.Sigma, M, d.P);
      Eigen::MatrixXd phi;
      try {
        phi = longrun_measure(spectral_density_zero(sys, t));
      } catch (const NumericalError&) {
        ++dropped;
        continue;
      }
      for (Index i = 0; i < M; ++i) {
        for (Index j = 0; j < M; ++j) {
          if (i != j) cell[static_cast<std::size_t>(i * M + j)].push_back(phi(i, j));
        }
      }
    }
    for (Index i = 0; i < M; ++i) {
      for (Index j = 0; j < M; ++j) {
        if (i == j) continue;
        const auto& v = cell[static_cast<std::size_t>(i * M + j)];
        rows.push_back({t, i, j, quantile(v, 0.5), quantile(v, 0.16), quantile(v, 0.84), dropped});
      }
    }
  }
  return rows;
}

}  // namespace emvar
