#pragma once

#include "emvar/random.hpp"

#include <Eigen/Dense>

#include <vector>

namespace emvar {

// Scalar-observation state space with a random-walk state:
//   obs_t = load_t' tau_t + e_t,   e_t ~ N(0, obs_var_t)
//   tau_t = tau_{t-1} + nu_t,      nu_t ~ N(0, I),  tau_0 = 0 exactly.
struct FfbsProblem {
  Eigen::VectorXd obs;      // T
  Eigen::MatrixXd load;     // T x r
  Eigen::VectorXd obs_var;  // T, strictly positive
};

void check_ffbs(const FfbsProblem& problem);

// Joint draw of tau_{1:T} (T x r) by forward filtering, backward sampling.
Eigen::MatrixXd ffbs_sample(const FfbsProblem& problem, RngStream& rng);

struct SmoothedStates {
  Eigen::MatrixXd mean;              // T x r
  std::vector<Eigen::MatrixXd> cov;  // T matrices r x r
};

// Rauch-Tung-Striebel smoother for the same model.
SmoothedStates kalman_smooth(const FfbsProblem& problem);

}  // namespace emvar
