#include "fixtures.hpp"

#include "emvar/errors.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace emvar;

TEST(Dimensions, ThreeVariablesThreeLags) {
  ModelSpec s;
  s.M = 3;
  s.P = 3;
  const Dimensions d = derive_dimensions(s);
  EXPECT_EQ(d.K, 9);
  EXPECT_EQ(d.k, 27);
  EXPECT_EQ(d.v, (std::vector<Index>{9, 10, 11}));
  EXPECT_EQ(d.N, 27 + 3);
}

TEST(Dimensions, SixVariables) {
  ModelSpec s;
  s.M = 6;
  s.P = 3;
  const Dimensions d = derive_dimensions(s);
  EXPECT_EQ(d.K, 18);
  EXPECT_EQ(d.k, 108);
  EXPECT_EQ(d.N, 108 + 15);
}

TEST(Dimensions, ModifierCount) {
  ModelSpec s;
  s.M = 3;
  s.include_obs = true;
  s.R_r = 3;
  s.include_ms = true;
  s.delta = 1;
  const Dimensions d = derive_dimensions(s);
  EXPECT_EQ(d.R, 9);
  for (Index j = 0; j < 3; ++j) EXPECT_EQ(d.R_eq[j], 5);
}

TEST(Dimensions, RandomWalkPresetFactorsPerCoefficient) {
  const Dimensions d = derive_dimensions(random_walk_tvp_spec(2, 2));
  EXPECT_EQ(d.delta, (std::vector<Index>{4, 5}));
  EXPECT_EQ(d.R_tau, 9);
}

TEST(Validate, WholeGridOnSixVariables) {
  const DataPanel panel = fixtures::stable_panel(60, 6, 1, 2);
  for (int obs : {0, 1})
    for (int ms : {0, 1})
      for (Index delta : {0, 1, 2, 3}) {
        ModelSpec s;
        s.M = 6;
        s.P = 3;
        s.include_obs = obs;
        s.R_r = obs ? 2 : 0;
        s.include_ms = ms;
        s.delta = delta;
        DataPanel p = panel;
        if (!obs) p.modifiers.resize(60, 0);
        const CheckedSpec c = validate_spec(s, p);
        EXPECT_EQ(c.dims.K, c.dims.M * c.dims.P);
        EXPECT_EQ(c.dims.k, c.dims.M * c.dims.K);
        EXPECT_EQ(c.dims.N, c.dims.k + c.dims.M * (c.dims.M - 1) / 2);
        EXPECT_EQ(c.dims.T, 57);
      }
  DataPanel p = panel;
  p.modifiers.resize(60, 0);
  EXPECT_NO_THROW(validate_spec([] { auto s = constant_spec(6, 3); return s; }(), p));
  EXPECT_NO_THROW(validate_spec(random_walk_tvp_spec(6, 3), p));
}

TEST(Validate, Rejections) {
  const DataPanel p = fixtures::stable_panel(30, 2, 1);
  ModelSpec s;
  s.M = 3;
  EXPECT_THROW(validate_spec(s, p), ValidationError);
  s.M = 2;
  s.P = 25;
  EXPECT_THROW(validate_spec(s, p), ValidationError);
  s.P = 1;
  s.include_obs = true;
  s.R_r = 1;
  EXPECT_THROW(validate_spec(s, p), ValidationError);
  s.include_obs = false;
  s.R_r = 0;
  s.mcmc.burn = s.mcmc.draws;
  EXPECT_THROW(validate_spec(s, p), ValidationError);
  s.mcmc = {};
  s.mcmc.thin = 7;
  EXPECT_THROW(validate_spec(s, p), ValidationError);
  s.mcmc = {};
  s.random_walk_tvp = true;
  s.delta = 1;
  EXPECT_THROW(validate_spec(s, p), ValidationError);
  s.random_walk_tvp = false;
  s.delta = 0;
  s.priors.sv.mu_var = 0.0;
  EXPECT_THROW(validate_spec(s, p), ValidationError);
}

TEST(Validate, PanelProblems) {
  DataPanel p = fixtures::stable_panel(30, 2, 1);
  ModelSpec s;
  s.M = 2;
  DataPanel bad = p;
  bad.y(4, 1) = std::nan("");
  EXPECT_THROW(validate_spec(s, bad), ValidationError);
  bad = p;
  std::swap(bad.dates[3], bad.dates[4]);
  EXPECT_THROW(validate_spec(s, bad), ValidationError);
  bad = p;
  bad.dates.pop_back();
  EXPECT_THROW(validate_spec(s, bad), ValidationError);
}

TEST(LagMatrix, ScalarExample) {
  const LagMatrices l = build_lag_matrix((MatrixXd(3, 1) << 1, 2, 3).finished(), 1);
  EXPECT_EQ(l.x, (MatrixXd(2, 1) << 1, 2).finished());
  EXPECT_EQ(l.y, (MatrixXd(2, 1) << 2, 3).finished());
}

TEST(LagMatrix, Shape) {
  const LagMatrices l = build_lag_matrix(MatrixXd::Random(5, 2), 2);
  EXPECT_EQ(l.x.rows(), 3);
  EXPECT_EQ(l.x.cols(), 4);
}

TEST(LagMatrix, IndexOracle) {
  const MatrixXd y = MatrixXd::Random(17, 3);
  const Index P = 4;
  const LagMatrices l = build_lag_matrix(y, P);
  for (Index t = 0; t < y.rows() - P; ++t) {
    for (Index lag = 1; lag <= P; ++lag)
      for (Index m = 0; m < 3; ++m) EXPECT_EQ(l.x(t, (lag - 1) * 3 + m), y(t + P - lag, m));
    for (Index m = 0; m < 3; ++m) EXPECT_EQ(l.y(t, m), y(t + P, m));
  }
  EXPECT_THROW(build_lag_matrix(y, 17), ValidationError);
}

TEST(SpecHash, StableAndSensitive) {
  ModelSpec base;
  base.M = 2;
  EXPECT_EQ(spec_hash(base), spec_hash(base));
  std::set<std::uint64_t> seen{spec_hash(base)};
  std::vector<ModelSpec> variants(10, base);
  variants[0].P = 2;
  variants[1].include_ms = true;
  variants[2].delta = 1;
  variants[3].zero_state_variance = true;
  variants[4].priors.sv.mu_var = 10;
  variants[5].priors.transition.e11 = 9;
  variants[6].priors.horseshoe_cap = 10;
  variants[7].mcmc.thin = 5;
  variants[8].mcmc.cross_equation_likelihood = false;
  variants[9].include_obs = true;
  variants[9].R_r = 1;
  for (const auto& v : variants) EXPECT_TRUE(seen.insert(spec_hash(v)).second) << describe(v);
  ModelSpec seeded = base;
  seeded.mcmc.seed = 77;
  EXPECT_EQ(spec_hash(seeded), spec_hash(base));
}
