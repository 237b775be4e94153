#include "fixtures.hpp"

#include "emvar/longrun.hpp"
#include "emvar/nelson_siegel.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace emvar;

TEST(NsLoadings, Limits) {
  const Eigen::Vector3d small = ns_loadings(1e-12, 0.7308);
  EXPECT_NEAR(small[0], 1.0, 1e-15);
  EXPECT_NEAR(small[1], 1.0, 1e-12);
  EXPECT_NEAR(small[2], 0.0, 1e-12);
  const Eigen::Vector3d large = ns_loadings(1e4, 0.7308);
  EXPECT_NEAR(large[1], 0.0, 1e-3);
  EXPECT_NEAR(large[2], 0.0, 1e-3);
}

TEST(NsLoadings, UnitMaturity) {
  const Eigen::Vector3d l = ns_loadings(1.0, 0.7308);
  EXPECT_NEAR(l[1], 0.709464125522862046, 1e-15);
  EXPECT_NEAR(l[2], 0.227940508454969629, 1e-15);
  EXPECT_DOUBLE_EQ(NsConfig{}.alpha, 12 * 0.0609);
}

TEST(NsLoadings, SeriesBranchIsContinuous) {
  for (double x : {0.5e-8, 0.99e-8, 1.01e-8, 2e-8}) EXPECT_NEAR(ns_loadings(x, 1.0)[1], -std::expm1(-x) / x, 1e-15);
}

TEST(NsFactors, FlatCurveIsLevel) {
  const MatrixXd y = MatrixXd::Constant(4, 6, 3.25);
  const MatrixXd f = extract_factors(y, NsConfig{});
  for (Index t = 0; t < 4; ++t) {
    EXPECT_NEAR(f(t, 0), 3.25, 1e-12);
    EXPECT_NEAR(f(t, 1), 0.0, 1e-11);
    EXPECT_NEAR(f(t, 2), 0.0, 1e-11);
  }
}

TEST(NsFactors, ExactRecoveryAndRoundTrip) {
  const NsConfig c;
  MatrixXd f(3, 3);
  f << 5.0, -1.0, 0.5, 4.2, -2.0, 1.5, 6.0, 0.3, -0.7;
  const MatrixXd y = reconstruct_yields(f, c);
  EXPECT_LT((extract_factors(y, c) - f).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(NsFactors, NormalEquationsAndOrthogonality) {
  const NsConfig c;
  const MatrixXd L = ns_loading_matrix(c);
  RngStream r(1);
  MatrixXd y(5, 6);
  for (Index t = 0; t < 5; ++t)
    for (Index k = 0; k < 6; ++k) y(t, k) = 3.0 + r.normal();
  const MatrixXd f = extract_factors(y, c);
  const MatrixXd oracle = ((L.transpose() * L).inverse() * L.transpose() * y.transpose()).transpose();
  EXPECT_LT((f - oracle).cwiseAbs().maxCoeff(), 1e-9);
  const MatrixXd resid = y - reconstruct_yields(f, c);
  EXPECT_LT((resid * L).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(NsConfig, Rejections) {
  NsConfig c;
  c.alpha = 0.0;
  EXPECT_THROW(check_ns_config(c), ValidationError);
  c = NsConfig{};
  c.maturities = {1.0, 2.0};
  EXPECT_THROW(check_ns_config(c), ValidationError);
  c.maturities = {1.0, 2.0, 2.0};
  EXPECT_THROW(check_ns_config(c), ValidationError);
  c.maturities = {-1.0, 2.0, 3.0};
  EXPECT_THROW(check_ns_config(c), ValidationError);
  EXPECT_THROW(extract_factors(MatrixXd::Zero(2, 5), NsConfig{}), ValidationError);
}

TEST(Companion, Structure) {
  // M = 2, P = 2: equation rows hold (y_{t-1}, y_{t-2}) coefficients.
  VectorXd beta(8);
  beta << 1, 2, 3, 4, 5, 6, 7, 8;
  const MatrixXd S = MatrixXd::Identity(2, 2) * 0.5;
  const CompanionSystem c = companion_form(beta, S, 2, 2);
  MatrixXd B(4, 4);
  B << 1, 2, 3, 4, 5, 6, 7, 8, 1, 0, 0, 0, 0, 1, 0, 0;
  EXPECT_EQ(c.B, B);
  EXPECT_EQ(c.J, (MatrixXd(2, 4) << 1, 0, 0, 0, 0, 1, 0, 0).finished());
  EXPECT_EQ(c.Omega.topLeftCorner(2, 2), S);
  EXPECT_EQ(c.Omega.bottomRows(2).cwiseAbs().sum(), 0.0);
  EXPECT_THROW(companion_form(VectorXd::Zero(7), S, 2, 2), ValidationError);
}

TEST(SpectralDensity, NoDynamicsGivesSigma) {
  MatrixXd S(2, 2);
  S << 2.0, 0.3, 0.3, 1.0;
  EXPECT_LT((spectral_density_zero(companion_form(VectorXd::Zero(8), S, 2, 2)) - S).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SpectralDensity, ScalarAutoregressions) {
  const MatrixXd s = MatrixXd::Constant(1, 1, 0.8);
  EXPECT_NEAR(spectral_density_zero(companion_form(VectorXd::Constant(1, 0.6), s, 1, 1))(0, 0), 0.8 / 0.16, 1e-12);
  const VectorXd b2 = (VectorXd(2) << 0.5, 0.2).finished();
  EXPECT_NEAR(spectral_density_zero(companion_form(b2, s, 1, 2))(0, 0), 0.8 / 0.09, 1e-11);
}

TEST(SpectralDensity, BivariateOracle) {
  MatrixXd A(2, 2);
  A << 0.5, 0.1, -0.2, 0.3;
  MatrixXd S(2, 2);
  S << 1.0, 0.4, 0.4, 2.0;
  const VectorXd beta = A.transpose().reshaped();
  const MatrixXd G = (MatrixXd::Identity(2, 2) - A).inverse();
  const MatrixXd oracle = G * S * G.transpose();
  EXPECT_LT((spectral_density_zero(companion_form(beta, S, 2, 1)) - oracle).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SpectralDensity, NonstationaryCarriesPeriod) {
  try {
    spectral_density_zero(companion_form(VectorXd::Constant(1, 1.0), MatrixXd::Ones(1, 1), 1, 1), 17);
    FAIL() << "expected NonstationaryError";
  } catch (const NonstationaryError& e) {
    EXPECT_EQ(e.t(), 17);
  }
}

TEST(LongrunMeasure, Examples) {
  MatrixXd Phi(2, 2);
  Phi << 4.0, 1.0, 1.0, 2.0;
  const MatrixXd m = longrun_measure(Phi);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m(1, 0), 0.25);
  EXPECT_TRUE(std::isnan(m(0, 0)));
  Phi(1, 1) = 0.0;
  EXPECT_THROW(longrun_measure(Phi), NumericalError);
}

TEST(Quantile, TypeSeven) {
  EXPECT_DOUBLE_EQ(quantile({3, 1, 2, 4}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.16), 1.64);
  EXPECT_TRUE(std::isnan(quantile({}, 0.5)));
}

TEST(LongrunPaths, ConstantDrawsGiveFlatPaths) {
  PosteriorDraws d = fixtures::tiny_posterior(fixtures::short_chain(constant_spec(3, 1)));
  for (auto& e : d.eq)
    for (Index s = 0; s < d.count; ++s) e.log_vol.row(s).setConstant(e.log_vol(s, 0));
  const std::vector<LongrunRow> rows = longrun_paths(d);
  const Index T = d.dims.T;
  ASSERT_EQ(static_cast<Index>(rows.size()), T * 3 * 2);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const LongrunRow& a = rows[k];
    const LongrunRow& first = rows[k % 6];
    EXPECT_EQ(a.t, static_cast<Index>(k / 6));
    EXPECT_NE(a.i, a.j);
    EXPECT_NEAR(a.median, first.median, 1e-10);
    EXPECT_LE(a.q16, a.median);
    EXPECT_LE(a.median, a.q84);
  }
}

TEST(LongrunPaths, ReducedFormAndDroppedDraws) {
  PosteriorDraws d = fixtures::tiny_posterior(fixtures::short_chain(constant_spec(2, 1)));
  const ReducedForm rf = reduced_form_at(d, 3, 5);
  const double q = d.eq[1].gamma(3, 2);
  const double h0 = std::exp(d.eq[0].log_vol(3, 5)), h1 = std::exp(d.eq[1].log_vol(3, 5));
  EXPECT_NEAR(rf.Sigma(0, 0), h0, 1e-12);
  EXPECT_NEAR(rf.Sigma(1, 0), q * h0, 1e-12);
  EXPECT_NEAR(rf.Sigma(1, 1), q * q * h0 + h1, 1e-12);
  EXPECT_EQ(rf.beta[2], d.eq[1].gamma(3, 0));

  d.eq[0].gamma(0, 0) = 5.0;
  for (const LongrunRow& r : longrun_paths(d)) EXPECT_EQ(r.n_dropped, 1);
}
