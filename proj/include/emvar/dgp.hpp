#pragma once

#include "emvar/gibbs.hpp"
#include "emvar/random.hpp"

#include <optional>

namespace emvar {

// Every generative quantity behind a simulated panel.
struct TruthRecord {
  SweepState state;        // gamma, Lambda, omega, tau, S, P_j, SV, scales, tvp; resid = eps
  MatrixXd initial_lags;   // P x M, y before the first effective period
  MatrixXd modifiers;      // T x R_r observed modifiers (row t holds r_{t-1})
  VectorXd next_modifiers; // r_T
};

// Spec with dimensions for an effective sample of length T, no panel needed.
CheckedSpec check_for_simulation(const ModelSpec& spec, Index T);

// Standardized AR(1) with coefficient 0.9 and unit innovations, T x R.
MatrixXd synthetic_modifiers(Index T, Index R, RngStream& rng);

// All parameters and latent paths drawn from the prior. Half-Cauchy scales
// are capped at spec.priors.horseshoe_cap.
TruthRecord draw_truth_from_prior(const CheckedSpec& checked, RngStream& rng);

// Recomputes tvp = Lambda z + eta for fresh eta ~ N(0, diag omega).
void redraw_tvp(const CheckedSpec& checked, const ModelData& data, EquationState& eq, Index j,
                RngStream& rng);

// Observations given the truth (fresh shocks); fills truth.state.resid.
// The returned panel has P + T rows, the first P being the initial lags.
DataPanel simulate_observations(const CheckedSpec& checked, TruthRecord& truth, RngStream& rng);

struct SimulatedPanel {
  DataPanel panel;
  TruthRecord truth;
};

// True when the reduced-form lag polynomial is stable at every t.
bool truth_is_stable(const CheckedSpec& checked, const TruthRecord& truth);

// With no truth supplied, draws one from the prior (no stability screening).
// Initial lags are standard normal.
SimulatedPanel simulate_dgp(const ModelSpec& spec, std::optional<TruthRecord> truth, Index T,
                            RngStream& rng);

}  // namespace emvar
