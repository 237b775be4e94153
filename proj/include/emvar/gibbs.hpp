#pragma once

#include "emvar/errors.hpp"
#include "emvar/model.hpp"
#include "emvar/random.hpp"
#include "emvar/shrinkage.hpp"
#include "emvar/stochvol.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace emvar {

// Lag-aligned data seen by the sampler: row t of every matrix refers to the
// same effective period.
struct ModelData {
  MatrixXd x;  // T x K
  MatrixXd y;  // T x M
  MatrixXd r;  // T x R_r (observed modifiers, already lagged by the caller)
};

ModelData make_model_data(const CheckedSpec& checked, const DataPanel& panel);

// Per-equation latent quantities. Loadings columns are ordered
// (observed r, switching S, latent tau). In the random-walk preset the tau
// block of the loadings is diagonal.
struct EquationState {
  VectorXd gamma;               // v_j
  MatrixXd loadings;            // v_j x R_j
  VectorXd omega;               // v_j, >= 0
  MatrixXd tau;                 // T x delta_j
  Eigen::VectorXi regime;       // T, in {0, 1}; empty without switching
  Eigen::Matrix2d transition = Eigen::Matrix2d::Constant(0.5);
  VectorXd log_vol;             // T
  SvParams sv;
  HorseshoeState hs_loadings;   // one group per loadings column (one group when diagonal)
  HorseshoeState hs_constants;  // one group
  HorseshoeState hs_sqrt_omega; // one group
  MatrixXd tvp;                 // T x v_j, gamma tilde
};

struct SweepState {
  std::vector<EquationState> eq;
  MatrixXd resid;  // T x M structural shocks eps_jt under the current draw
  Index sweep = 0;
};

// Column layout of z_jt inside Lambda_j.
struct ModifierLayout {
  Index obs = 0;      // first observed column
  Index ms = -1;      // switching column or -1
  Index tau = 0;      // first latent column
  Index width = 0;    // R_j
  bool diagonal_tau = false;
};

ModifierLayout modifier_layout(const CheckedSpec& checked, Index j);

// Row t is (x_t', eps_1t, ..., eps_{j-1,t}).
MatrixXd build_equation_regressors(Index j, const MatrixXd& x, const MatrixXd& resid);

// z_jt stacked over t, T x R_j.
MatrixXd modifier_matrix(const CheckedSpec& checked, Index j, const ModelData& data,
                         const EquationState& eq);

// Recomputes eps for equations first..M-1 in order.
void refresh_residuals(const CheckedSpec& checked, const ModelData& data, SweepState& state,
                       Index first = 0);

// Response and noise variance seen by equation j's mean parameters. Without
// the cross-equation term this is (y_j, exp(h_j)). With it, the likelihood of
// later equations, which use eps_j as a regressor, is folded in as one
// Gaussian pseudo-observation per t.
struct EffectiveObservation {
  VectorXd response;
  VectorXd noise_var;
};

EffectiveObservation effective_observation(const CheckedSpec& checked, Index j,
                                           const ModelData& data, const SweepState& state,
                                           bool cross_equation);

// m' diag(omega) m + noise_var per row.
VectorXd marginal_noise_variance(const MatrixXd& m, const VectorXd& omega,
                                 const VectorXd& noise_var);

// Everything one equation's blocks need, built once per equation visit.
struct EquationContext {
  Index j = 0;
  ModifierLayout layout;
  MatrixXd m;              // T x v_j
  EffectiveObservation obs;
};

EquationContext make_context(const CheckedSpec& checked, Index j, const ModelData& data,
                             const SweepState& state);

void sample_z_block(const CheckedSpec& checked, const EquationContext& ctx, const ModelData& data,
                    EquationState& eq, RngStream& rng);
void sample_loadings_and_constants(const CheckedSpec& checked, const EquationContext& ctx,
                                   const ModelData& data, EquationState& eq, RngStream& rng);
void sample_tvp_paths(const CheckedSpec& checked, const EquationContext& ctx,
                      const ModelData& data, EquationState& eq, RngStream& rng);
void sample_state_variances(const CheckedSpec& checked, EquationState& eq, const MatrixXd& eta,
                            RngStream& rng);

// eta_jt = tvp_jt - Lambda_j z_jt, T x v_j.
MatrixXd state_innovations(const CheckedSpec& checked, Index j, const ModelData& data,
                           const EquationState& eq);

// Free loadings in horseshoe order (vec of Lambda, or its diagonal).
VectorXd free_loadings(const ModifierLayout& layout, const MatrixXd& loadings);
void set_free_loadings(const ModifierLayout& layout, const VectorXd& values, MatrixXd& loadings);

struct BlockTimes {
  double z = 0.0, loadings = 0.0, tvp = 0.0, omega = 0.0, sv = 0.0, shrinkage = 0.0;
};

struct SweepDiagnostics {
  BlockTimes seconds;
  std::vector<Index> phi_accepted;     // per equation
  std::vector<Index> sigma2_accepted;  // per equation
};

// One full sweep over j = 0..M-1. Draws use streams (seed, {chain, sweep, j}).
void gibbs_sweep(const CheckedSpec& checked, const ModelData& data, SweepState& state,
                 std::uint64_t chain, SweepDiagnostics* diag = nullptr);

// Warm start: ridge constants, smoothed log squared residuals for h, tau = 0,
// S = 0, omega = 0.01 (0 for the constant spec), unit scales, prior-mean P_j.
SweepState initialize_state(const CheckedSpec& checked, const ModelData& data);

// Stored draws, one row per kept sweep, one array per (equation, field).
struct EquationDraws {
  MatrixXd gamma;          // n x v
  MatrixXd loadings;       // n x v R_j, vec order
  MatrixXd omega;          // n x v
  MatrixXd tau;            // n x T delta, vec order
  MatrixXd regime;         // n x T
  MatrixXd transition;     // n x 2 (p00, p11)
  MatrixXd log_vol;        // n x T
  MatrixXd sv;             // n x 3 (mu, phi, sigma2)
  MatrixXd tvp;            // n x T v, vec order
  MatrixXd hs_loadings_local, hs_loadings_global;
  MatrixXd hs_constants_local, hs_constants_global;
  MatrixXd hs_omega_local, hs_omega_global;
};

struct ChainDiagnostics {
  BlockTimes seconds;
  std::vector<double> phi_acceptance;
  std::vector<double> sigma2_acceptance;
  double wall_seconds = 0.0;
};

struct PosteriorDraws {
  ModelSpec spec;
  Dimensions dims;
  std::uint64_t spec_hash = 0;
  std::uint64_t seed = 0;
  Index count = 0;
  std::vector<EquationDraws> eq;
  // Modifier row for the period after the sample (raw r_T), if known.
  VectorXd next_modifiers;
  // Last P observations of y, most recent last; used as forecast start.
  MatrixXd y_tail;
  // Observed modifiers of the estimation sample (T x R_r).
  MatrixXd modifiers;
  std::vector<std::string> variable_names;
  std::vector<std::string> dates;  // effective rows
  ChainDiagnostics diagnostics;

  EquationState state_at(Index draw, Index j) const;
};

void store_draw(const SweepState& state, Index slot, PosteriorDraws& draws);

// Aborted chain. `partial` holds every stored draw up to the last completed
// sweep.
class ChainFailure : public NumericalError {
 public:
  ChainFailure(const std::string& what, Index sweep, Index equation,
               std::shared_ptr<PosteriorDraws> partial)
      : NumericalError(what), sweep_(sweep), equation_(equation), partial_(std::move(partial)) {}

  Index sweep() const { return sweep_; }
  Index equation() const { return equation_; }
  const std::shared_ptr<PosteriorDraws>& partial() const { return partial_; }

 private:
  Index sweep_;
  Index equation_;
  std::shared_ptr<PosteriorDraws> partial_;
};

PosteriorDraws run_chain(const CheckedSpec& checked, const DataPanel& panel, std::uint64_t chain = 0);

struct NormalizedModifiers {
  MatrixXd z;               // T x R, each column mapped to [0, 1]
  MatrixXd loadings;        // Lambda U^{-1}
  VectorXd intercept;       // Lambda times the column minima, absorbed by gamma
  std::vector<bool> degenerate;
};

NormalizedModifiers normalize_modifiers(const MatrixXd& z, const MatrixXd& loadings);

}  // namespace emvar
