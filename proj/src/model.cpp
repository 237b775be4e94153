#include "emvar/model.hpp"

#include "emvar/errors.hpp"

#include <cmath>
#include <sstream>

namespace emvar {

namespace {

bool all_finite(const MatrixXd& m) { return m.allFinite(); }

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ValidationError(std::string("prior entry ") + name + " must be finite and positive");
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace

void check_panel(const DataPanel& panel) {
  const Index T = panel.rows();
  if (panel.variables() < 1) throw ValidationError("panel has no endogenous variables");
  if (panel.modifier_count() > 0 && panel.modifiers.rows() != T) {
    throw ValidationError("modifier rows (" + std::to_string(panel.modifiers.rows()) +
                          ") differ from observation rows (" + std::to_string(T) + ")");
  }
  if (!panel.dates.empty()) {
    if (static_cast<Index>(panel.dates.size()) != T) {
      throw ValidationError("date count differs from observation rows");
    }
    for (std::size_t i = 1; i < panel.dates.size(); ++i) {
      if (!(panel.dates[i - 1] < panel.dates[i])) {
        throw ValidationError("dates not strictly increasing at row " + std::to_string(i + 1) +
                              " (" + panel.dates[i - 1] + " >= " + panel.dates[i] + ")");
      }
    }
  }
  if (!all_finite(panel.y)) throw ValidationError("endogenous data contain missing or non-finite values");
  if (panel.modifier_count() > 0 && !all_finite(panel.modifiers)) {
    throw ValidationError("modifier data contain missing or non-finite values");
  }
  if (panel.next_modifiers && panel.next_modifiers->size() != panel.modifier_count()) {
    throw ValidationError("next-period modifier row has the wrong length");
  }
}

Dimensions derive_dimensions(const ModelSpec& spec) {
  if (spec.M < 1) throw ValidationError("M must be at least 1");
  if (spec.P < 1) throw ValidationError("lag order P must be at least 1");
  if (spec.delta < 0) throw ValidationError("delta must be nonnegative");
  if (spec.R_r < 0) throw ValidationError("R_r must be nonnegative");
  if (spec.include_obs && spec.R_r == 0) {
    throw ValidationError("include_obs is set but R_r = 0");
  }
  if (spec.random_walk_tvp && (spec.include_obs || spec.include_ms || spec.delta != 0)) {
    throw ValidationError("random-walk TVP preset excludes observed, switching and factor modifiers");
  }
  Dimensions d;
  d.M = spec.M;
  d.P = spec.P;
  d.K = spec.M * spec.P;
  d.k = spec.M * d.K;
  d.R_r = spec.include_obs ? spec.R_r : 0;
  d.R_S = spec.include_ms ? spec.M : 0;
  d.v.resize(spec.M);
  d.delta.resize(spec.M);
  d.R_eq.resize(spec.M);
  Index r_tau = 0;
  Index n = 0;
  for (Index j = 0; j < spec.M; ++j) {
    d.v[j] = d.K + j;
    d.delta[j] = spec.random_walk_tvp ? d.v[j] : spec.delta;
    d.R_eq[j] = d.R_r + (spec.include_ms ? 1 : 0) + d.delta[j];
    r_tau += d.delta[j];
    n += d.v[j];
  }
  d.R_tau = r_tau;
  d.R = d.R_r + d.R_S + d.R_tau;
  d.N = n;
  return d;
}

CheckedSpec validate_spec(const ModelSpec& spec, const DataPanel& panel) {
  check_panel(panel);
  if (spec.M != panel.variables()) {
    throw ValidationError("spec declares M = " + std::to_string(spec.M) + " but panel has " +
                          std::to_string(panel.variables()) + " endogenous columns");
  }
  if (spec.include_obs && spec.R_r != panel.modifier_count()) {
    throw ValidationError("spec declares R_r = " + std::to_string(spec.R_r) + " but panel has " +
                          std::to_string(panel.modifier_count()) + " modifier columns");
  }
  Dimensions d = derive_dimensions(spec);
  if (panel.rows() <= spec.P + 10) {
    throw ValidationError("T = " + std::to_string(panel.rows()) + " too small for P = " +
                          std::to_string(spec.P) + " (need T > P + 10)");
  }
  d.T = panel.rows() - spec.P;

  const auto& pr = spec.priors;
  require_positive(pr.sv.mu_var, "sv.mu_var");
  require_positive(pr.sv.phi_a, "sv.phi_a");
  require_positive(pr.sv.phi_b, "sv.phi_b");
  require_positive(pr.sv.sigma2_shape, "sv.sigma2_shape");
  require_positive(pr.sv.sigma2_rate, "sv.sigma2_rate");
  require_positive(pr.transition.e00, "transition.e00");
  require_positive(pr.transition.e01, "transition.e01");
  require_positive(pr.transition.e10, "transition.e10");
  require_positive(pr.transition.e11, "transition.e11");
  if (!(pr.horseshoe_cap > 0.0)) throw ValidationError("horseshoe cap must be positive");

  const auto& mc = spec.mcmc;
  if (mc.draws < 1 || mc.burn < 0 || mc.thin < 1 || mc.burn >= mc.draws) {
    throw ValidationError("MCMC settings need draws > burn >= 0 and thin >= 1");
  }
  if ((mc.draws - mc.burn) % mc.thin != 0) {
    throw ValidationError("draws - burn must be a multiple of thin");
  }
  return {spec, d};
}

LagMatrices build_lag_matrix(const MatrixXd& y, Index P) {
  const Index T = y.rows();
  const Index M = y.cols();
  if (P < 1) throw ValidationError("lag order must be at least 1");
  if (T <= P) {
    throw ValidationError("need more than P = " + std::to_string(P) + " rows to form lags, have " +
                          std::to_string(T));
  }
  LagMatrices out;
  out.x.resize(T - P, M * P);
  out.y = y.bottomRows(T - P);
  for (Index lag = 1; lag <= P; ++lag) {
    out.x.middleCols((lag - 1) * M, M) = y.middleRows(P - lag, T - P);
  }
  return out;
}

ModelSpec constant_spec(Index M, Index P) {
  ModelSpec s;
  s.M = M;
  s.P = P;
  s.zero_state_variance = true;
  return s;
}

ModelSpec random_walk_tvp_spec(Index M, Index P) {
  ModelSpec s;
  s.M = M;
  s.P = P;
  s.random_walk_tvp = true;
  return s;
}

std::string describe(const ModelSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << "M=" << s.M << ";P=" << s.P << ";obs=" << s.include_obs << ";R_r=" << s.R_r
     << ";ms=" << s.include_ms << ";delta=" << s.delta << ";zero_omega=" << s.zero_state_variance
     << ";rw=" << s.random_walk_tvp << ";sv=" << s.priors.sv.mu_mean << ',' << s.priors.sv.mu_var
     << ',' << s.priors.sv.phi_a << ',' << s.priors.sv.phi_b << ',' << s.priors.sv.sigma2_shape
     << ',' << s.priors.sv.sigma2_rate << ";tp=" << s.priors.transition.e00 << ','
     << s.priors.transition.e01 << ',' << s.priors.transition.e10 << ','
     << s.priors.transition.e11 << ";cap=" << s.priors.horseshoe_cap << ";mcmc=" << s.mcmc.draws
     << ',' << s.mcmc.burn << ',' << s.mcmc.thin << ',' << s.mcmc.cross_equation_likelihood;
  return os.str();
}

std::uint64_t spec_hash(const ModelSpec& spec) { return fnv1a(describe(spec)); }

}  // namespace emvar
