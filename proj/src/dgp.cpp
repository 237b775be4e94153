#include "emvar/dgp.hpp"

#include "emvar/errors.hpp"
#include "emvar/longrun.hpp"
#include "emvar/markov.hpp"

#include <cmath>
#include <cstdio>

namespace emvar {

namespace {

std::string month_label(Index i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-01", static_cast<int>(1960 + i / 12), static_cast<int>(i % 12 + 1));
  return buf;
}

ModelData modifier_only_data(const CheckedSpec& checked, const MatrixXd& r) {
  ModelData data;
  data.y = MatrixXd::Zero(checked.dims.T, checked.dims.M);
  data.x = MatrixXd::Zero(checked.dims.T, checked.dims.K);
  data.r = r;
  return data;
}

VectorXd scaled_normals(const VectorXd& var, RngStream& rng) {
  VectorXd out(var.size());
  for (Index i = 0; i < var.size(); ++i) out[i] = std::sqrt(var[i]) * rng.normal();
  return out;
}

}  // namespace

CheckedSpec check_for_simulation(const ModelSpec& spec, Index T) {
  if (T < 3) throw ValidationError("simulation needs T >= 3");
  CheckedSpec out{spec, derive_dimensions(spec)};
  out.dims.T = T;
  return out;
}

MatrixXd synthetic_modifiers(Index T, Index R, RngStream& rng) {
  MatrixXd r(T, R);
  for (Index c = 0; c < R; ++c) {
    double prev = rng.normal() / std::sqrt(1.0 - 0.81);
    for (Index t = 0; t < T; ++t) {
      prev = 0.9 * prev + rng.normal();
      r(t, c) = prev;
    }
    const double mean = r.col(c).mean();
    const double sd = std::sqrt((r.col(c).array() - mean).square().sum() / static_cast<double>(std::max<Index>(T - 1, 1)));
    r.col(c) = (r.col(c).array() - mean) / (sd > 0.0 ? sd : 1.0);
  }
  return r;
}

void redraw_tvp(const CheckedSpec& checked, const ModelData& data, EquationState& eq, Index j,
                RngStream& rng) {
  const MatrixXd z = modifier_matrix(checked, j, data, eq);
  const Index T = z.rows();
  const Index v = eq.gamma.size();
  eq.tvp = z.cols() > 0 ? MatrixXd(z * eq.loadings.transpose()) : MatrixXd::Zero(T, v);
  const VectorXd sd = eq.omega.cwiseSqrt();
  for (Index t = 0; t < T; ++t) {
    for (Index i = 0; i < v; ++i) eq.tvp(t, i) += sd[i] * rng.normal();
  }
}

TruthRecord draw_truth_from_prior(const CheckedSpec& checked, RngStream& rng) {
  const auto& d = checked.dims;
  const auto& pr = checked.spec.priors;
  const Index T = d.T;
  TruthRecord truth;
  if (d.R_r > 0) {
    const MatrixXd r = synthetic_modifiers(T + 1, d.R_r, rng);
    truth.modifiers = r.topRows(T);
    truth.next_modifiers = r.row(T).transpose();
  } else {
    truth.modifiers.resize(T, 0);
  }
  const ModelData data = modifier_only_data(checked, truth.modifiers);

  // Shapes and scale containers from the warm start, then overwritten.
  SweepState& s = truth.state;
  s.eq.resize(static_cast<std::size_t>(d.M));
  s.resid = MatrixXd::Zero(T, d.M);
  for (Index j = 0; j < d.M; ++j) {
    EquationState& eq = s.eq[j];
    const ModifierLayout l = modifier_layout(checked, j);
    const Index v = d.v[j];

    eq.hs_constants = HorseshoeState::single_group(v);
    draw_horseshoe_prior(eq.hs_constants, pr.horseshoe_cap, rng);
    eq.gamma = scaled_normals(prior_variance_for(eq.hs_constants), rng);

    eq.loadings = MatrixXd::Zero(v, l.width);
    if (l.width == 0) eq.hs_loadings = HorseshoeState::single_group(0);
    else if (l.diagonal_tau) eq.hs_loadings = HorseshoeState::single_group(l.width);
    else eq.hs_loadings = HorseshoeState::column_groups(v, l.width);
    if (eq.hs_loadings.size() > 0) {
      draw_horseshoe_prior(eq.hs_loadings, pr.horseshoe_cap, rng);
      set_free_loadings(l, scaled_normals(prior_variance_for(eq.hs_loadings), rng), eq.loadings);
    }

    eq.hs_sqrt_omega = HorseshoeState::single_group(v);
    draw_horseshoe_prior(eq.hs_sqrt_omega, pr.horseshoe_cap, rng);
    eq.omega = scaled_normals(prior_variance_for(eq.hs_sqrt_omega), rng).array().square();
    if (checked.spec.zero_state_variance) eq.omega.setZero();

    const Index n_tau = l.width - l.tau;
    eq.tau.resize(T, n_tau);
    for (Index c = 0; c < n_tau; ++c) {
      double walk = 0.0;
      for (Index t = 0; t < T; ++t) eq.tau(t, c) = (walk += rng.normal());
    }

    const auto& tp = pr.transition;
    const double p00 = sample_beta(tp.e00, tp.e01, rng);
    const double p11 = sample_beta(tp.e10, tp.e11, rng);
    eq.transition << p00, 1.0 - p00, 1.0 - p11, p11;
    if (l.ms >= 0) {
      eq.regime.resize(T);
      const Eigen::Vector2d pi = stationary_distribution(eq.transition);
      int state = rng.uniform() < pi[1] ? 1 : 0;
      for (Index t = 0; t < T; ++t) {
        if (t > 0 && rng.uniform() >= eq.transition(state, state)) state = 1 - state;
        eq.regime[t] = state;
      }
    }

    SvDraw sv = draw_sv_prior(pr.sv, T, rng);
    eq.log_vol = std::move(sv.log_vol);
    eq.sv = sv.params;

    redraw_tvp(checked, data, eq, j, rng);
  }
  truth.initial_lags = MatrixXd::Zero(d.P, d.M);
  return truth;
}

DataPanel simulate_observations(const CheckedSpec& checked, TruthRecord& truth, RngStream& rng) {
  const auto& d = checked.dims;
  const Index T = d.T, P = d.P, M = d.M, K = d.K;
  if (static_cast<Index>(truth.state.eq.size()) != M || truth.state.eq[0].log_vol.size() != T) {
    throw ValidationError("truth record does not match the spec dimensions");
  }
  truth.initial_lags.resize(P, M);
  for (Index i = 0; i < P; ++i) {
    for (Index j = 0; j < M; ++j) truth.initial_lags(i, j) = rng.normal();
  }
  MatrixXd y(P + T, M);
  y.topRows(P) = truth.initial_lags;
  truth.state.resid.resize(T, M);
  VectorXd x(K);
  for (Index t = 0; t < T; ++t) {
    for (Index lag = 1; lag <= P; ++lag) x.segment((lag - 1) * M, M) = y.row(P + t - lag).transpose();
    for (Index j = 0; j < M; ++j) {
      const EquationState& eq = truth.state.eq[j];
      const VectorXd b = eq.gamma + eq.tvp.row(t).transpose();
      double value = b.head(K).dot(x);
      for (Index l = 0; l < j; ++l) value += b[K + l] * truth.state.resid(t, l);
      const double eps = std::exp(0.5 * eq.log_vol[t]) * rng.normal();
      truth.state.resid(t, j) = eps;
      y(P + t, j) = value + eps;
    }
  }
  DataPanel panel;
  panel.y = std::move(y);
  panel.modifiers = MatrixXd::Zero(P + T, d.R_r);
  if (d.R_r > 0) {
    panel.modifiers.bottomRows(T) = truth.modifiers;
    panel.next_modifiers = truth.next_modifiers;
  }
  for (Index i = 0; i < P + T; ++i) panel.dates.push_back(month_label(i));
  for (Index j = 0; j < M; ++j) panel.variable_names.push_back("y" + std::to_string(j + 1));
  for (Index c = 0; c < d.R_r; ++c) panel.modifier_names.push_back("r" + std::to_string(c + 1));
  return panel;
}

bool truth_is_stable(const CheckedSpec& checked, const TruthRecord& truth) {
  const auto& d = checked.dims;
  VectorXd beta(d.M * d.K);
  const MatrixXd no_cov = MatrixXd::Zero(d.M, d.M);
  for (Index t = 0; t < d.T; ++t) {
    for (Index j = 0; j < d.M; ++j) {
      const EquationState& eq = truth.state.eq[j];
      beta.segment(j * d.K, d.K) = eq.gamma.head(d.K) + eq.tvp.row(t).head(d.K).transpose();
    }
    if (!(spectral_radius(companion_form(beta, no_cov, d.M, d.P).B) < 1.0)) return false;
  }
  return true;
}

SimulatedPanel simulate_dgp(const ModelSpec& spec, std::optional<TruthRecord> truth, Index T,
                            RngStream& rng) {
  const CheckedSpec checked = check_for_simulation(spec, T);
  SimulatedPanel out;
  out.truth = truth ? std::move(*truth) : draw_truth_from_prior(checked, rng);
  out.panel = simulate_observations(checked, out.truth, rng);
  return out;
}

}  // namespace emvar
