#pragma once

#include "emvar/random.hpp"

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace emvar {

// Horseshoe hierarchy in the auxiliary inverse-gamma form:
//   b_i ~ N(0, c_i^2 d_g^2),  c_i^2 | e_i ~ IG(1/2, 1/e_i),  e_i ~ IG(1/2, 1),
//   d_g^2 | f_g ~ IG(1/2, 1/f_g),  f_g ~ IG(1/2, 1),
// with g = group(i). Stored quantities are the squared scales.
struct HorseshoeState {
  Eigen::VectorXd local;       // c_i^2
  Eigen::VectorXd local_aux;   // e_i
  Eigen::VectorXd global;      // d_g^2
  Eigen::VectorXd global_aux;  // f_g
  std::vector<Eigen::Index> group;

  Eigen::Index size() const { return local.size(); }
  Eigen::Index groups() const { return global.size(); }

  // All scales and auxiliaries at one.
  static HorseshoeState single_group(Eigen::Index n);
  // Column-major element order (matching vec()), one group per column.
  static HorseshoeState column_groups(Eigen::Index rows, Eigen::Index cols);
};

enum class ShrinkageBlock { loadings, constants, sqrt_omega };

struct InverseGammaParams {
  double shape = 0.0;
  double scale = 0.0;
};

// Closed-form conditionals.
InverseGammaParams local_scale_conditional(double b, double global, double local_aux);
InverseGammaParams global_scale_conditional(const Eigen::Ref<const Eigen::VectorXd>& b,
                                            const Eigen::Ref<const Eigen::VectorXd>& local,
                                            double global_aux);
InverseGammaParams local_aux_conditional(double local);
InverseGammaParams global_aux_conditional(double global);

// One full update for every group: locals, global, then auxiliaries.
// `cap` bounds the half-Cauchy scales (c_i, d_g <= cap), infinite by default.
void update_horseshoe(const Eigen::Ref<const Eigen::VectorXd>& b, HorseshoeState& state,
                      RngStream& rng,
                      double cap = std::numeric_limits<double>::infinity());

// Per-coefficient prior variances c_i^2 d_{group(i)}^2.
Eigen::VectorXd prior_variance_for(const HorseshoeState& state);

void check_horseshoe(const HorseshoeState& state);

// Draws the hierarchy from its prior: capped half-Cauchy scales, auxiliaries
// from their conditionals given the scales.
void draw_horseshoe_prior(HorseshoeState& state, double cap, RngStream& rng);

}  // namespace emvar
