#pragma once

#include "emvar/dgp.hpp"
#include "emvar/gibbs.hpp"
#include "emvar/model.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace fixtures {

using namespace emvar;

// Stable bivariate VAR(1) with homoskedastic shocks; rows are labelled by month.
inline DataPanel stable_panel(Index T, Index M, std::uint64_t seed, Index R = 0) {
  RngStream rng(seed, {99, 0, 0});
  DataPanel p;
  p.y = MatrixXd::Zero(T, M);
  for (Index t = 1; t < T; ++t)
    for (Index j = 0; j < M; ++j) {
      double v = 0.5 * p.y(t - 1, j) + 0.5 * rng.normal();
      if (j > 0) v += 0.1 * p.y(t - 1, j - 1);
      p.y(t, j) = v;
    }
  p.modifiers = R > 0 ? synthetic_modifiers(T, R, rng) : MatrixXd(T, 0);
  for (Index t = 0; t < T; ++t) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-01", static_cast<int>(2000 + t / 12), static_cast<int>(t % 12 + 1));
    p.dates.emplace_back(buf);
  }
  for (Index j = 0; j < M; ++j) p.variable_names.push_back("y" + std::to_string(j + 1));
  for (Index c = 0; c < R; ++c) p.modifier_names.push_back("r" + std::to_string(c + 1));
  return p;
}

inline ModelSpec short_chain(ModelSpec s, Index draws = 60, Index burn = 20, Index thin = 2) {
  s.mcmc.draws = draws;
  s.mcmc.burn = burn;
  s.mcmc.thin = thin;
  return s;
}

inline PosteriorDraws tiny_posterior(const ModelSpec& spec, Index T = 40, std::uint64_t seed = 3) {
  const DataPanel p = stable_panel(T, spec.M, seed, spec.include_obs ? spec.R_r : 0);
  return run_chain(validate_spec(spec, p), p);
}

}  // namespace fixtures
