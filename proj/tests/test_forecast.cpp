#include "fixtures.hpp"

#include "emvar/errors.hpp"
#include "emvar/forecast.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace emvar;

namespace {

EvaluationInput small_evaluation() {
  EvaluationInput in;
  const DataPanel p = fixtures::stable_panel(50, 2, 21);
  in.var = ClassData{p, MatrixXd::Identity(2, 2)};
  in.realized = p.y;
  in.target_names = {"y1", "y2"};
  in.horizons = {1, 3};
  in.first_origin = 40;
  in.last_origin = 43;
  in.seed = 9;
  return in;
}

std::vector<EvalSpec> small_grid() {
  ModelSpec tvp;
  tvp.M = 2;
  tvp.delta = 1;
  return {{"const", ModelClass::var, fixtures::short_chain(constant_spec(2, 1), 30, 10, 1)},
          {"tvp", ModelClass::var, fixtures::short_chain(tvp, 30, 10, 1)}};
}

}  // namespace

TEST(Rmse, Examples) {
  EXPECT_DOUBLE_EQ(score_rmse(VectorXd::Ones(3), VectorXd::Ones(3)), 0.0);
  EXPECT_DOUBLE_EQ(score_rmse((VectorXd(2) << 1, 2).finished(), (VectorXd(2) << 1, 4).finished()), std::sqrt(2.0));
  RngStream r(1);
  VectorXd a(50), b(50);
  for (Index i = 0; i < 50; ++i) {
    a[i] = r.normal();
    b[i] = 3.0 * r.normal();
  }
  double ss = 0.0;
  for (Index i = 0; i < 50; ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  EXPECT_NEAR(score_rmse(a, b), std::sqrt(ss / 50.0), 1e-14);
  EXPECT_THROW(score_rmse(VectorXd(0), VectorXd(0)), ValidationError);
}

TEST(Lpbf, Examples) {
  const VectorXd a = (VectorXd(3) << -1.0, -2.0, -0.5).finished();
  EXPECT_DOUBLE_EQ(score_lpbf(a, a), 0.0);
  EXPECT_DOUBLE_EQ(score_lpbf(a, a.array() - 0.25), 0.25);
  EXPECT_THROW(score_lpbf(a, VectorXd(2)), ValidationError);
}

TEST(MixtureDensity, StandardNormalAtZero) {
  EXPECT_NEAR(mixture_log_density(VectorXd::Zero(1), VectorXd::Ones(1), 0.0), -0.9189385332046727, 1e-14);
  // Replicating a component leaves the mixture unchanged.
  EXPECT_NEAR(mixture_log_density(VectorXd::Zero(4), VectorXd::Ones(4), 0.0), -0.9189385332046727, 1e-14);
}

TEST(MixtureDensity, IntegratesToOne) {
  const VectorXd m = (VectorXd(3) << -1.0, 0.5, 3.0).finished();
  const VectorXd v = (VectorXd(3) << 0.3, 1.0, 2.5).finished();
  double area = 0.0;
  const double dx = 1e-3;
  for (double y = -15.0; y <= 20.0; y += dx) area += std::exp(mixture_log_density(m, v, y)) * dx;
  EXPECT_NEAR(area, 1.0, 1e-6);
}

TEST(MixtureDensity, FloorAndJointForm) {
  EXPECT_EQ(mixture_log_density(VectorXd::Zero(1), VectorXd::Constant(1, 1e-4), 100.0), kLogFloor);
  const VectorXd y = (VectorXd(2) << 0.3, -1.1).finished();
  MatrixXd cov = MatrixXd::Zero(2, 2);
  cov.diagonal() << 0.5, 2.0;
  const double joint = mixture_log_density({VectorXd::Zero(2)}, {cov}, y);
  const double split = mixture_log_density(VectorXd::Zero(1), VectorXd::Constant(1, 0.5), 0.3) +
                       mixture_log_density(VectorXd::Zero(1), VectorXd::Constant(1, 2.0), -1.1);
  EXPECT_NEAR(joint, split, 1e-13);
}

TEST(ChainSeed, DeterministicAndDistinct) {
  EXPECT_EQ(chain_seed(1, "a", 5), chain_seed(1, "a", 5));
  EXPECT_NE(chain_seed(1, "a", 5), chain_seed(1, "b", 5));
  EXPECT_NE(chain_seed(1, "a", 5), chain_seed(1, "a", 6));
  EXPECT_NE(chain_seed(1, "a", 5), chain_seed(2, "a", 5));
}

TEST(Predictive, ConstantModelMeanIsLinear) {
  const PosteriorDraws d = fixtures::tiny_posterior(fixtures::short_chain(constant_spec(2, 2)));
  RngStream r(2);
  const PredictivePath p = simulate_predictive(d, 4, 3, r);
  VectorXd x(4);
  x << d.y_tail.row(1).transpose(), d.y_tail.row(0).transpose();
  for (Index j = 0; j < 2; ++j) EXPECT_NEAR(p.mean(0, j), d.eq[j].gamma.row(4).head(4).dot(x), 1e-12);
  // One-step covariance is Q diag(exp h) Q' with the AR(1)-stepped log volatility
  EXPECT_GT(p.cov[0](0, 0), 0.0);
  EXPECT_NEAR(p.cov[0](1, 0), d.eq[1].gamma(4, 4) * p.cov[0](0, 0), 1e-12);
  EXPECT_THROW(simulate_predictive(d, 0, 0, r), ValidationError);
  EXPECT_THROW(simulate_predictive(d, d.count, 1, r), ValidationError);
}

TEST(Predictive, CumulationRoundTrip) {
  const PosteriorDraws d = fixtures::tiny_posterior(fixtures::short_chain(constant_spec(2, 1)));
  const VectorXd base = (VectorXd(2) << 10.0, -3.0).finished();
  const auto levels = predictive_sample(d, {1, 2}, {MatrixXd::Identity(2, 2), base}, 5);
  const auto diffs = predictive_sample(d, {1, 2}, {MatrixXd::Identity(2, 2), std::nullopt}, 5);
  for (Index s = 0; s < d.count; ++s) {
    const VectorXd one = diffs[0].value.row(s), two = diffs[1].value.row(s);
    EXPECT_LT((levels[0].value.row(s).transpose() - base - one).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((levels[1].value.row(s).transpose() - base - one - two).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((levels[1].var.row(s) - diffs[1].var.row(s)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Predictive, TargetMapIsLinear) {
  const PosteriorDraws d = fixtures::tiny_posterior(fixtures::short_chain(constant_spec(2, 1)));
  MatrixXd A(1, 2);
  A << 2.0, -1.0;
  const auto mapped = predictive_sample(d, {2}, {A, std::nullopt}, 6);
  const auto raw = predictive_sample(d, {2}, {MatrixXd::Identity(2, 2), std::nullopt}, 6);
  for (Index s = 0; s < d.count; ++s) {
    EXPECT_NEAR(mapped[0].value(s, 0), 2.0 * raw[0].value(s, 0) - raw[0].value(s, 1), 1e-12);
    EXPECT_NEAR(mapped[0].var(s, 0), (A * raw[0].cov[s] * A.transpose())(0, 0), 1e-12);
  }
}

TEST(Evaluation, SelfBenchmarkAndInvariances) {
  EvaluationInput in = small_evaluation();
  in.benchmark = "const";
  in.joint_score = true;
  const std::vector<EvalSpec> grid = small_grid();
  const EvaluationResult res = recursive_evaluate(grid, in);
  ASSERT_EQ(res.table.specs.size(), 2u);
  for (std::size_t h = 0; h < 2; ++h) {
    for (std::size_t i = 0; i < 2; ++i) {
      const ScoreCell& c = res.table.cells[0][h][i];
      EXPECT_EQ(c.rmse_ratio, 1.0);
      EXPECT_EQ(c.lpbf, 0.0);
      EXPECT_EQ(c.origins, 4);
      EXPECT_TRUE(std::isfinite(res.table.cells[1][h][i].lpbf));
    }
    EXPECT_EQ(res.table.joint[0][h].lpbf, 0.0);
  }

  const ScoreTable again = score_records(grid, in, res.records);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t h = 0; h < 2; ++h)
      for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(again.cells[s][h][i].rmse_ratio, res.table.cells[s][h][i].rmse_ratio);
        EXPECT_EQ(again.cells[s][h][i].lpbf, res.table.cells[s][h][i].lpbf);
      }

  const std::vector<EvalSpec> reversed{grid[1], grid[0]};
  in.threads = 3;
  const EvaluationResult rev = recursive_evaluate(reversed, in);
  for (std::size_t h = 0; h < 2; ++h)
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_EQ(rev.table.cells[0][h][i].rmse_ratio, res.table.cells[1][h][i].rmse_ratio);
      EXPECT_EQ(rev.table.cells[0][h][i].lpbf, res.table.cells[1][h][i].lpbf);
    }
}

TEST(Evaluation, HorizonsBeyondPanelAreSkipped) {
  EvaluationInput in = small_evaluation();
  in.benchmark = "const";
  in.first_origin = 47;
  in.last_origin = 48;
  const std::vector<EvalSpec> grid{small_grid()[0]};
  const auto records = run_recursive_forecasts(grid, in);
  // Origin 47 scores h = 1 only (h = 3 runs past row 49); origin 48 scores h = 1.
  EXPECT_EQ(records.size(), 2u);
  for (const auto& r : records) EXPECT_EQ(r.horizon, 1);
  in.benchmark = "missing";
  EXPECT_THROW(recursive_evaluate(grid, in), ValidationError);
}

TEST(Evaluation, MissingClassDataRejectedUpFront) {
  EvaluationInput in = small_evaluation();
  in.benchmark = "ns";
  in.threads = 2;
  const ModelSpec s = fixtures::short_chain(constant_spec(2, 1), 30, 10, 1);
  EXPECT_THROW(run_recursive_forecasts({{"ns", ModelClass::ns_var, s}}, in), ValidationError);
}
