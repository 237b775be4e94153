#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace emvar {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Observed multivariate series plus optional observed effect modifiers.
// `modifiers` row t already holds the one-period lag r_{t-1}; the core never
// re-lags. `next_modifiers` is the modifier row for T+1 (the raw r_T), used
// when forecasting.
struct DataPanel {
  std::vector<std::string> dates;
  MatrixXd y;          // T x M
  MatrixXd modifiers;  // T x R_r, zero columns when absent
  std::vector<std::string> variable_names;
  std::vector<std::string> modifier_names;
  std::optional<VectorXd> next_modifiers;

  Index rows() const { return y.rows(); }
  Index variables() const { return y.cols(); }
  Index modifier_count() const { return modifiers.cols(); }
};

// Checks shape consistency, ordering of dates and absence of non-finite values.
void check_panel(const DataPanel& panel);

struct SvPrior {
  double mu_mean = 0.0;
  double mu_var = 100.0;
  // (phi + 1) / 2 ~ Beta(phi_a, phi_b)
  double phi_a = 5.0;
  double phi_b = 1.5;
  // sigma^2 ~ Gamma(shape, rate)
  double sigma2_shape = 0.5;
  double sigma2_rate = 0.5;
};

// p_ii ~ Beta(e_i0, e_i1); the off-diagonal entry of row i is 1 - p_ii.
struct TransitionPrior {
  double e00 = 10.0;
  double e01 = 1.0;
  double e10 = 1.0;
  double e11 = 10.0;
};

struct PriorConfig {
  SvPrior sv;
  TransitionPrior transition;
  // Upper bound on every half-Cauchy scale of the horseshoe hierarchy. Infinite
  // for the model proper; finite values are a simulation-harness bound.
  double horseshoe_cap = std::numeric_limits<double>::infinity();
};

struct McmcConfig {
  Index draws = 15000;  // total sweeps, burn-in included
  Index burn = 5000;
  Index thin = 10;
  std::uint64_t seed = 1;
  // Folds the likelihood contribution of later equations (whose regressors
  // include equation j's shocks) into equation j's conditionals. Off gives the
  // plain equation-local conditionals.
  bool cross_equation_likelihood = true;

  Index stored() const { return (draws - burn) / thin; }
};

struct ModelSpec {
  Index M = 0;                    // endogenous variables
  Index P = 1;                    // lag order
  bool include_obs = false;       // observed modifiers r_t
  Index R_r = 0;                  // count of observed modifiers
  bool include_ms = false;        // one Markov-switching indicator per equation
  Index delta = 0;                // latent random-walk factors per equation
  bool zero_state_variance = false;  // omega fixed at 0 (constant coefficients)
  // Conventional random-walk TVP: per equation delta_j = v_j factors, each
  // loading on its own coefficient (diagonal loadings). Excludes r_t and S_t.
  bool random_walk_tvp = false;
  PriorConfig priors;
  McmcConfig mcmc;
};

// Dimension bookkeeping derived from a validated spec.
struct Dimensions {
  Index M = 0, P = 0, K = 0, k = 0;
  Index T = 0;  // effective rows after dropping P initial lags
  Index R_r = 0, R_S = 0, R_tau = 0, R = 0;
  Index N = 0;  // k + number of free covariance elements
  std::vector<Index> v;      // regressors per equation, K + j
  std::vector<Index> delta;  // latent factors per equation
  std::vector<Index> R_eq;   // modifier columns per equation

  Index obs_columns() const { return R_r; }
  bool has_switching() const { return R_S > 0; }
};

struct CheckedSpec {
  ModelSpec spec;
  Dimensions dims;
};

CheckedSpec validate_spec(const ModelSpec& spec, const DataPanel& panel);

// Dimension identities only, no panel (T left at 0).
Dimensions derive_dimensions(const ModelSpec& spec);

struct LagMatrices {
  MatrixXd x;      // (T - P) x K, row t = (y'_{t-1}, ..., y'_{t-P})
  MatrixXd y;      // (T - P) x M
};

LagMatrices build_lag_matrix(const MatrixXd& y, Index P);

// Named presets.
ModelSpec constant_spec(Index M, Index P);
ModelSpec random_walk_tvp_spec(Index M, Index P);

// Stable 64-bit digest of every field that changes the posterior.
std::uint64_t spec_hash(const ModelSpec& spec);
std::string describe(const ModelSpec& spec);

}  // namespace emvar
