#pragma once

#include "emvar/model.hpp"
#include "emvar/random.hpp"

#include <Eigen/Dense>

namespace emvar {

// transition(a, b) = Pr(S_t = b | S_{t-1} = a); rows sum to one. The chain
// starts from the stationary distribution of `transition`.
struct SwitchProblem {
  Eigen::MatrixXd loglik;  // T x 2 per-regime observation log densities
  Eigen::Matrix2d transition;
};

void check_switch(const SwitchProblem& problem);

Eigen::Vector2d stationary_distribution(const Eigen::Matrix2d& transition);

struct SwitchFilter {
  Eigen::MatrixXd predicted;  // T x 2, Pr(S_t | data_{1:t-1})
  Eigen::MatrixXd filtered;   // T x 2, Pr(S_t | data_{1:t})
};

// Hamilton filter, normalized at every step (log-likelihoods are shifted by
// their row maximum before exponentiation).
SwitchFilter hamilton_filter(const SwitchProblem& problem);

// Kim smoother: Pr(S_t | data_{1:T}), T x 2.
Eigen::MatrixXd smoothed_probabilities(const SwitchProblem& problem);

// Joint draw of S_{1:T} by forward filtering and backward simulation.
Eigen::VectorXi kim_sample_path(const SwitchProblem& problem, RngStream& rng);

struct TransitionCounts {
  Eigen::Index n00 = 0, n01 = 0, n10 = 0, n11 = 0;
};

// Transitions over t = 2..T; the first state belongs to the initial law.
TransitionCounts count_transitions(const Eigen::VectorXi& path);

struct BetaParams {
  double a = 0.0;
  double b = 0.0;
};

// Conditionals of p_00 and p_11 given a path.
BetaParams stay_conditional(int regime, const TransitionCounts& counts, const TransitionPrior& prior);

Eigen::Matrix2d update_transition_probs(const Eigen::VectorXi& path, const TransitionPrior& prior,
                                        RngStream& rng);

}  // namespace emvar
