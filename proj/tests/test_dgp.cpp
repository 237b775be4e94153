#include "support.hpp"

#include "emvar/dgp.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace emvar;

namespace {

ModelSpec rich_spec() {
  ModelSpec s;
  s.M = 2;
  s.P = 1;
  s.include_obs = true;
  s.R_r = 1;
  s.include_ms = true;
  s.delta = 1;
  s.priors.horseshoe_cap = 1.0;
  return s;
}

struct Prior {
  CheckedSpec checked;
  TruthRecord truth;
  ModelData data;
};

Prior prior_world(Index T, std::uint64_t seed) {
  const CheckedSpec c = check_for_simulation(rich_spec(), T);
  RngStream rng(seed);
  TruthRecord truth = draw_truth_from_prior(c, rng);
  ModelData data{MatrixXd::Zero(T, c.dims.K), MatrixXd::Zero(T, 2), truth.modifiers};
  return {c, std::move(truth), std::move(data)};
}

double lag1_autocorrelation(const VectorXd& x) {
  const VectorXd d = x.array() - x.mean();
  return d.head(d.size() - 1).dot(d.tail(d.size() - 1)) / d.squaredNorm();
}

}  // namespace

TEST(Tvp, NoLoadingsNoDriftIsZero) {
  Prior s = prior_world(100, 1);
  RngStream rng(2);
  for (Index j = 0; j < 2; ++j) {
    EquationState& eq = s.truth.state.eq[j];
    eq.loadings.setZero();
    eq.omega.setZero();
    redraw_tvp(s.checked, s.data, eq, j, rng);
    EXPECT_EQ(eq.tvp.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Tvp, NoLoadingsIsWhiteNoise) {
  const Index T = 2000;
  Prior s = prior_world(T, 3);
  RngStream rng(4);
  EquationState& eq = s.truth.state.eq[1];
  eq.loadings.setZero();
  eq.omega.setConstant(0.5);
  redraw_tvp(s.checked, s.data, eq, 1, rng);
  for (Index i = 0; i < eq.tvp.cols(); ++i) {
    EXPECT_LT(std::abs(lag1_autocorrelation(eq.tvp.col(i))), 0.05) << "coefficient " << i;
    EXPECT_NEAR(eq.tvp.col(i).squaredNorm() / T, 0.5, 0.05);
  }
}

TEST(Tvp, SingleModifierDrivesEveryCoefficient) {
  Prior s = prior_world(300, 5);
  RngStream rng(6);
  const ModifierLayout l = modifier_layout(s.checked, 0);
  EquationState& eq = s.truth.state.eq[0];
  const VectorXd col = eq.loadings.col(l.tau);
  eq.loadings.setZero();
  eq.loadings.col(l.tau) = col;
  eq.omega.setZero();
  redraw_tvp(s.checked, s.data, eq, 0, rng);
  const VectorXd z = modifier_matrix(s.checked, 0, s.data, eq).col(l.tau);
  for (Index i = 0; i < eq.tvp.cols(); ++i) {
    if (col[i] == 0.0) continue;
    EXPECT_NEAR(std::abs(testsupport::correlation(eq.tvp.col(i), z)), 1.0, 1e-10);
  }
}

TEST(Modifiers, Standardized) {
  RngStream rng(7);
  const MatrixXd r = synthetic_modifiers(400, 3, rng);
  for (Index c = 0; c < 3; ++c) {
    const double m = r.col(c).mean();
    EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_NEAR((r.col(c).array() - m).square().sum() / 399.0, 1.0, 1e-12);
    EXPECT_GT(lag1_autocorrelation(r.col(c)), 0.7);
  }
}

TEST(Simulation, ShapesAndDeterminism) {
  RngStream a(8), b(8);
  const SimulatedPanel p = simulate_dgp(rich_spec(), std::nullopt, 120, a);
  const SimulatedPanel q = simulate_dgp(rich_spec(), std::nullopt, 120, b);
  EXPECT_EQ(p.panel.rows(), 121);
  EXPECT_EQ(p.panel.y, q.panel.y);
  EXPECT_EQ(p.panel.modifiers, q.panel.modifiers);
  EXPECT_EQ(p.truth.state.eq[1].gamma, q.truth.state.eq[1].gamma);
  EXPECT_EQ(p.truth.initial_lags.rows(), 1);
  EXPECT_EQ(p.panel.y.topRows(1), p.truth.initial_lags);
  EXPECT_EQ(p.panel.modifiers.bottomRows(120), p.truth.modifiers);
}

TEST(Simulation, ObservationsFollowTheTriangularSystem) {
  RngStream rng(9);
  const SimulatedPanel p = simulate_dgp(rich_spec(), std::nullopt, 60, rng);
  const CheckedSpec c = check_for_simulation(rich_spec(), 60);
  const ModelData data = make_model_data(c, p.panel);
  SweepState st = p.truth.state;
  st.resid.setZero();
  refresh_residuals(c, data, st, 0);
  // Unscreened prior draws can explode, so the tolerance follows |y|.
  const MatrixXd scale = data.y.cwiseAbs().array() + 1.0;
  EXPECT_LT(((st.resid - p.truth.state.resid).cwiseAbs().array() / scale.array()).maxCoeff(), 1e-9)
      << "stable truth: " << truth_is_stable(c, p.truth);
}

TEST(Simulation, GivenTruthIsReused) {
  RngStream a(10);
  const SimulatedPanel first = simulate_dgp(rich_spec(), std::nullopt, 50, a);
  RngStream b(11);
  const SimulatedPanel second = simulate_dgp(rich_spec(), first.truth, 50, b);
  EXPECT_EQ(second.truth.state.eq[0].gamma, first.truth.state.eq[0].gamma);
  EXPECT_EQ(second.truth.state.eq[0].tvp, first.truth.state.eq[0].tvp);
  EXPECT_NE(second.panel.y, first.panel.y);
}

TEST(Stability, ExplosiveOwnLagIsFlagged) {
  ModelSpec s = constant_spec(2, 1);
  const CheckedSpec c = check_for_simulation(s, 20);
  RngStream rng(12);
  TruthRecord t = draw_truth_from_prior(c, rng);
  for (auto& eq : t.state.eq) {
    eq.gamma.setZero();
    eq.tvp.setZero();
  }
  EXPECT_TRUE(truth_is_stable(c, t));
  t.state.eq[0].gamma[0] = 1.2;
  EXPECT_FALSE(truth_is_stable(c, t));
}
