#include "support.hpp"

#include "emvar/errors.hpp"
#include "emvar/model.hpp"
#include "emvar/random.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace emvar;
using testsupport::ks_test;

namespace {

template <typename F>
std::vector<double> draws(Index n, F&& f) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = f();
  return out;
}

}  // namespace

TEST(Stream, SameIdSameSequence) {
  RngStream a(5, {1, 2, 3}), b(5, {1, 2, 3}), c(5, {1, 2, 4});
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    EXPECT_EQ(x, b.normal());
    EXPECT_NE(x, c.normal());
  }
}

TEST(Stream, KernelsAreDeterministic) {
  RngStream a(9), b(9);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(sample_gig(-3.5, 2.0, 0.7, a), sample_gig(-3.5, 2.0, 0.7, b));
    EXPECT_EQ(sample_beta(2, 3, a), sample_beta(2, 3, b));
    EXPECT_EQ(sample_inverse_gamma(2, 1, a), sample_inverse_gamma(2, 1, b));
  }
}

TEST(Stream, UniformOpenInterval) {
  RngStream r(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Gig, GammaLimitMean) {
  RngStream r(11);
  const auto x = draws(1000000, [&] { return sample_gig(3.0, 0.0, 4.0, r); });
  EXPECT_NEAR(testsupport::mean_of(x), 1.5, 0.01);
}

TEST(Gig, InverseGammaLimitKs) {
  RngStream r(12);
  // psi = 0, lambda = -2.5, chi = 3: x ~ IG(2.5, 1.5), so 1/x ~ Gamma(2.5, rate 1.5).
  auto x = draws(100000, [&] { return 1.0 / sample_gig(-2.5, 3.0, 0.0, r); });
  const boost::math::gamma_distribution<> g(2.5, 1.0 / 1.5);
  EXPECT_GT(ks_test(x, [&](double v) { return boost::math::cdf(g, v); }).p_value, 0.01);
}

TEST(Gig, PosteriorRegionStaysPositive) {
  RngStream r(13);
  for (double lambda : {-0.0, -100.0, -249.5})
    for (double chi : {1e-12, 1.0, 500.0})
      for (int i = 0; i < 200; ++i) {
        const double x = sample_gig(lambda == 0.0 ? 0.0 : lambda, chi, 1.0, r);
        ASSERT_TRUE(std::isfinite(x) && x > 0.0) << lambda << " " << chi;
      }
}

TEST(Gig, InvalidParameters) {
  RngStream r(1);
  EXPECT_THROW(sample_gig(1.0, 0.0, 0.0, r), ValidationError);
  EXPECT_THROW(sample_gig(-1.0, 0.0, 1.0, r), ValidationError);
  EXPECT_THROW(sample_gig(1.0, 1.0, 0.0, r), ValidationError);
  EXPECT_THROW(sample_gig(1.0, -1.0, 1.0, r), ValidationError);
}

TEST(InverseGamma, Mean) {
  RngStream r(14);
  const auto x = draws(1000000, [&] { return sample_inverse_gamma(3.0, 4.0, r); });
  EXPECT_NEAR(testsupport::mean_of(x), 2.0, 0.01);
}

TEST(InverseGamma, MedianForShapeOne) {
  RngStream r(15);
  auto x = draws(200001, [&] { return sample_inverse_gamma(1.0, 1.0, r); });
  std::nth_element(x.begin(), x.begin() + 100000, x.end());
  EXPECT_NEAR(x[100000], 1.0 / std::log(2.0), 0.01);
}

TEST(InverseGamma, ReciprocalIsGamma) {
  RngStream r(16);
  auto x = draws(100000, [&] { return 1.0 / sample_inverse_gamma(1.7, 2.3, r); });
  const boost::math::gamma_distribution<> g(1.7, 1.0 / 2.3);
  EXPECT_GT(ks_test(x, [&](double v) { return boost::math::cdf(g, v); }).p_value, 0.01);
}

TEST(TruncatedGamma, MatchesTruncatedCdf) {
  RngStream r(17);
  for (auto [shape, rate, lower] : {std::tuple{0.5, 1.0, 2.0}, std::tuple{3.0, 2.0, 0.2}, std::tuple{3.0, 2.0, 4.0},
                                    std::tuple{1.0, 1.0, 0.01}}) {
    const boost::math::gamma_distribution<> g(shape, 1.0 / rate);
    const double below = boost::math::cdf(g, lower);
    auto x = draws(50000, [&] { return sample_gamma_lower_truncated(shape, rate, lower, r); });
    for (double v : x) ASSERT_GE(v, lower);
    EXPECT_GT(ks_test(x, [&](double v) { return (boost::math::cdf(g, v) - below) / (1.0 - below); }).p_value, 0.01)
        << shape << " " << rate << " " << lower;
  }
}

TEST(HalfCauchy, TruncatedCdf) {
  RngStream r(18);
  auto x = draws(50000, [&] { return sample_half_cauchy(10.0, r); });
  for (double v : x) ASSERT_LE(v, 10.0);
  EXPECT_GT(ks_test(x, [](double v) { return std::atan(v) / std::atan(10.0); }).p_value, 0.01);
  auto y = draws(50000, [&] { return sample_half_cauchy(std::numeric_limits<double>::infinity(), r); });
  EXPECT_GT(ks_test(y, [](double v) { return 2.0 / std::numbers::pi * std::atan(v); }).p_value, 0.01);
}

TEST(Beta, Means) {
  RngStream r(19);
  for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{10.0, 1.0}, std::pair{5.0, 1.5}}) {
    const auto x = draws(1000000, [&] { return sample_beta(a, b, r); });
    EXPECT_NEAR(testsupport::mean_of(x), a / (a + b), 0.01);
  }
}

TEST(Regression, EmptyDesignDrawsFromPrior) {
  RngStream r(20);
  const VectorXd prior = (VectorXd(2) << 4.0, 0.25).finished();
  std::vector<double> a, b;
  for (int i = 0; i < 100000; ++i) {
    const VectorXd d = sample_gaussian_regression(MatrixXd(0, 2), VectorXd(0), VectorXd(0), prior, r);
    a.push_back(d[0] * d[0]);
    b.push_back(d[1] * d[1]);
  }
  EXPECT_NEAR(testsupport::mean_of(a), 4.0, 0.06);
  EXPECT_NEAR(testsupport::mean_of(b), 0.25, 0.004);
}

TEST(Regression, OneObservation) {
  RngStream r(21);
  std::vector<double> x;
  for (int i = 0; i < 200000; ++i)
    x.push_back(sample_gaussian_regression(MatrixXd::Ones(1, 1), VectorXd::Constant(1, 2.0), VectorXd::Ones(1),
                                           VectorXd::Ones(1), r)[0]);
  const double m = testsupport::mean_of(x);
  double v = 0.0;
  for (double e : x) v += (e - m) * (e - m);
  v /= static_cast<double>(x.size() - 1);
  EXPECT_NEAR(m, 1.0, 0.006);
  EXPECT_NEAR(v, 0.5, 0.006);
}

TEST(Regression, DenseInverseOracle) {
  RngStream r(22);
  const Index n = 7, q = 3;
  MatrixXd X(n, q);
  VectorXd y(n), ov(n);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < q; ++k) X(i, k) = r.normal();
    y[i] = r.normal();
    ov[i] = 0.5 + r.uniform();
  }
  const VectorXd pv = (VectorXd(3) << 2.0, 0.3, 5.0).finished();
  const MatrixXd W = ov.cwiseInverse().asDiagonal();
  const MatrixXd V = (X.transpose() * W * X + MatrixXd(pv.cwiseInverse().asDiagonal())).inverse();
  const VectorXd mu = V * X.transpose() * W * y;

  const int N = 200000;
  VectorXd mean = VectorXd::Zero(q);
  MatrixXd second = MatrixXd::Zero(q, q);
  for (int i = 0; i < N; ++i) {
    const VectorXd d = sample_gaussian_regression(X, y, ov, pv, r);
    mean += d;
    second += d * d.transpose();
  }
  mean /= N;
  const MatrixXd cov = second / N - mean * mean.transpose();
  for (Index k = 0; k < q; ++k) {
    EXPECT_NEAR(mean[k], mu[k], 4.0 * std::sqrt(V(k, k) / N));
    for (Index l = 0; l < q; ++l) EXPECT_NEAR(cov(k, l), V(k, l), 0.02 * std::sqrt(V(k, k) * V(l, l)));
  }
}

TEST(Regression, IllConditionedThrows) {
  RngStream r(23);
  MatrixXd X(3, 2);
  X << 1, 1, 1, 1, 1, 1;
  EXPECT_THROW(sample_gaussian_regression(X, VectorXd::Ones(3), VectorXd::Constant(3, 1e-20),
                                          VectorXd::Constant(2, 1e20), r),
               NumericalError);
  EXPECT_THROW(sample_gaussian_regression(X, VectorXd::Ones(3), VectorXd::Ones(3), VectorXd::Zero(2), r),
               ValidationError);
}

TEST(Mvn, SemidefiniteCovariance) {
  RngStream r(24);
  MatrixXd cov(2, 2);
  cov << 1, 1, 1, 1;
  for (int i = 0; i < 100; ++i) {
    const VectorXd d = sample_mvn(VectorXd::Zero(2), cov, r);
    EXPECT_NEAR(d[0], d[1], 1e-8);
  }
  cov << 1, 0, 0, -1;
  EXPECT_THROW(sample_mvn(VectorXd::Zero(2), cov, r), NumericalError);
}
