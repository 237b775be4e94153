#include "emvar/gibbs.hpp"

#include "emvar/errors.hpp"
#include "emvar/ffbs.hpp"
#include "emvar/markov.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

namespace emvar {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Index free_loading_count(const ModifierLayout& layout, Index v) {
  return layout.diagonal_tau ? layout.width : v * layout.width;
}

// Row t: Lambda z_t.
MatrixXd modifier_mean(const MatrixXd& z, const MatrixXd& loadings) {
  if (z.cols() == 0) return MatrixXd::Zero(z.rows(), loadings.rows());
  return z * loadings.transpose();
}

VectorXd smoothed_log_square(const VectorXd& e) {
  const Index T = e.size();
  constexpr Index half = 5;
  // E log chi^2_1 is about -1.27.
  VectorXd raw = (e.array().square() + 1e-8).log() + 1.27;
  VectorXd out(T);
  for (Index t = 0; t < T; ++t) {
    const Index lo = std::max<Index>(0, t - half);
    const Index hi = std::min<Index>(T - 1, t + half);
    out[t] = raw.segment(lo, hi - lo + 1).mean();
  }
  return out;
}

}  // namespace

ModelData make_model_data(const CheckedSpec& checked, const DataPanel& panel) {
  const auto& d = checked.dims;
  const LagMatrices lags = build_lag_matrix(panel.y, d.P);
  ModelData out;
  out.x = lags.x;
  out.y = lags.y;
  if (d.R_r > 0) out.r = panel.modifiers.bottomRows(lags.y.rows());
  else out.r.resize(lags.y.rows(), 0);
  return out;
}

ModifierLayout modifier_layout(const CheckedSpec& checked, Index j) {
  const auto& d = checked.dims;
  ModifierLayout l;
  l.obs = 0;
  Index col = d.R_r;
  if (checked.spec.include_ms) l.ms = col++;
  l.tau = col;
  l.width = col + d.delta[j];
  l.diagonal_tau = checked.spec.random_walk_tvp;
  return l;
}

MatrixXd build_equation_regressors(Index j, const MatrixXd& x, const MatrixXd& resid) {
  MatrixXd m(x.rows(), x.cols() + j);
  m.leftCols(x.cols()) = x;
  if (j > 0) m.rightCols(j) = resid.leftCols(j);
  return m;
}

MatrixXd modifier_matrix(const CheckedSpec& checked, Index j, const ModelData& data,
                         const EquationState& eq) {
  const ModifierLayout l = modifier_layout(checked, j);
  const Index T = data.y.rows();
  MatrixXd z(T, l.width);
  if (checked.dims.R_r > 0) z.leftCols(checked.dims.R_r) = data.r;
  if (l.ms >= 0) z.col(l.ms) = eq.regime.cast<double>();
  if (l.width > l.tau) z.rightCols(l.width - l.tau) = eq.tau;
  return z;
}

void refresh_residuals(const CheckedSpec& checked, const ModelData& data, SweepState& state,
                       Index first) {
  const Index M = checked.dims.M;
  const Index T = data.y.rows();
  if (state.resid.rows() != T || state.resid.cols() != M) state.resid = MatrixXd::Zero(T, M);
  for (Index j = first; j < M; ++j) {
    const EquationState& eq = state.eq[j];
    const MatrixXd m = build_equation_regressors(j, data.x, state.resid);
    const MatrixXd coef = eq.tvp.rowwise() + eq.gamma.transpose();
    state.resid.col(j) = data.y.col(j) - m.cwiseProduct(coef).rowwise().sum();
  }
}

EffectiveObservation effective_observation(const CheckedSpec& checked, Index j,
                                           const ModelData& data, const SweepState& state,
                                           bool cross_equation) {
  const Index M = checked.dims.M;
  const Index K = checked.dims.K;
  const Index T = data.y.rows();
  EffectiveObservation out;
  out.response = data.y.col(j);
  out.noise_var = state.eq[j].log_vol.array().exp();
  if (!cross_equation || j == M - 1) return out;

  VectorXd b(M);
  for (Index t = 0; t < T; ++t) {
    double precision = 1.0 / out.noise_var[t];
    double linear = 0.0;
    b.setZero();
    b[j] = 1.0;
    for (Index i = j + 1; i < M; ++i) {
      const EquationState& eq = state.eq[i];
      const auto coef = [&](Index l) { return eq.gamma[K + l] + eq.tvp(t, K + l); };
      double bi = -coef(j);
      for (Index l = j + 1; l < i; ++l) bi -= coef(l) * b[l];
      b[i] = bi;
      const double ai = state.resid(t, i) - bi * state.resid(t, j);
      const double wi = std::exp(-eq.log_vol[t]);
      precision += bi * bi * wi;
      linear += ai * bi * wi;
    }
    out.response[t] += linear / precision;
    out.noise_var[t] = 1.0 / precision;
  }
  return out;
}

VectorXd marginal_noise_variance(const MatrixXd& m, const VectorXd& omega,
                                 const VectorXd& noise_var) {
  return m.array().square().matrix() * omega + noise_var;
}

EquationContext make_context(const CheckedSpec& checked, Index j, const ModelData& data,
                             const SweepState& state) {
  EquationContext ctx;
  ctx.j = j;
  ctx.layout = modifier_layout(checked, j);
  ctx.m = build_equation_regressors(j, data.x, state.resid);
  ctx.obs = effective_observation(checked, j, data, state,
                                  checked.spec.mcmc.cross_equation_likelihood);
  return ctx;
}

VectorXd free_loadings(const ModifierLayout& layout, const MatrixXd& loadings) {
  if (!layout.diagonal_tau) return loadings.reshaped();
  return loadings.diagonal();
}

void set_free_loadings(const ModifierLayout& layout, const VectorXd& values, MatrixXd& loadings) {
  if (!layout.diagonal_tau) {
    loadings = values.reshaped(loadings.rows(), loadings.cols());
    return;
  }
  loadings.setZero();
  loadings.diagonal() = values;
}

void sample_z_block(const CheckedSpec& checked, const EquationContext& ctx, const ModelData& data,
                    EquationState& eq, RngStream& rng) {
  const ModifierLayout& l = ctx.layout;
  const Index T = ctx.m.rows();
  const Index n_tau = l.width - l.tau;
  const bool has_ms = l.ms >= 0;
  if (n_tau == 0 && !has_ms) return;

  const VectorXd var = marginal_noise_variance(ctx.m, eq.omega, ctx.obs.noise_var);
  VectorXd base = ctx.obs.response - ctx.m * eq.gamma;
  const Index R_r = checked.dims.R_r;
  if (R_r > 0) {
    base -= (ctx.m * eq.loadings.leftCols(R_r)).cwiseProduct(data.r).rowwise().sum();
  }
  VectorXd ms_load;
  if (has_ms) ms_load = ctx.m * eq.loadings.col(l.ms);

  MatrixXd tau_load(T, n_tau);
  if (n_tau > 0) {
    if (l.diagonal_tau) {
      tau_load = ctx.m * eq.loadings.diagonal().asDiagonal();
    } else {
      tau_load = ctx.m * eq.loadings.rightCols(n_tau);
    }
    FfbsProblem p;
    p.obs = base;
    if (has_ms) p.obs -= ms_load.cwiseProduct(eq.regime.cast<double>());
    p.load = tau_load;
    p.obs_var = var;
    eq.tau = ffbs_sample(p, rng);
  }

  if (has_ms) {
    VectorXd rest = base;
    if (n_tau > 0) rest -= tau_load.cwiseProduct(eq.tau).rowwise().sum();
    SwitchProblem p;
    p.loglik.resize(T, 2);
    p.transition = eq.transition;
    for (Index t = 0; t < T; ++t) {
      const double c = -0.5 * std::log(2.0 * std::numbers::pi * var[t]);
      for (int s = 0; s < 2; ++s) {
        const double e = rest[t] - s * ms_load[t];
        p.loglik(t, s) = c - 0.5 * e * e / var[t];
      }
    }
    eq.regime = kim_sample_path(p, rng);
    eq.transition = update_transition_probs(eq.regime, checked.spec.priors.transition, rng);
  }
}

void sample_loadings_and_constants(const CheckedSpec& checked, const EquationContext& ctx,
                                   const ModelData& data, EquationState& eq, RngStream& rng) {
  const ModifierLayout& l = ctx.layout;
  const Index T = ctx.m.rows();
  const Index v = ctx.m.cols();
  const Index n_free = l.width > 0 ? free_loading_count(l, v) : 0;
  const MatrixXd z = modifier_matrix(checked, ctx.j, data, eq);

  MatrixXd design(T, v + n_free);
  design.leftCols(v) = ctx.m;
  if (n_free > 0) {
    if (l.diagonal_tau) {
      for (Index i = 0; i < l.width; ++i) design.col(v + i) = ctx.m.col(i).cwiseProduct(z.col(i));
    } else {
      for (Index c = 0; c < l.width; ++c) {
        design.middleCols(v + c * v, v) = ctx.m.array().colwise() * z.col(c).array();
      }
    }
  }
  VectorXd prior_var(v + n_free);
  prior_var.head(v) = prior_variance_for(eq.hs_constants);
  if (n_free > 0) prior_var.tail(n_free) = prior_variance_for(eq.hs_loadings);

  const VectorXd var = marginal_noise_variance(ctx.m, eq.omega, ctx.obs.noise_var);
  const VectorXd coef = sample_gaussian_regression(design, ctx.obs.response, var, prior_var, rng);
  eq.gamma = coef.head(v);
  if (n_free > 0) set_free_loadings(l, coef.tail(n_free), eq.loadings);
}

void sample_tvp_paths(const CheckedSpec& checked, const EquationContext& ctx,
                      const ModelData& data, EquationState& eq, RngStream& rng) {
  const Index T = ctx.m.rows();
  const Index v = ctx.m.cols();
  const MatrixXd prior_mean = modifier_mean(modifier_matrix(checked, ctx.j, data, eq), eq.loadings);
  if (checked.spec.zero_state_variance) {
    eq.tvp = prior_mean;
    return;
  }
  const VectorXd sd = eq.omega.cwiseSqrt();
  eq.tvp.resize(T, v);
  VectorXd g0(v);
  // Exact conditional draw by perturbing a joint prior draw with a
  // rank-one correction.
  for (Index t = 0; t < T; ++t) {
    for (Index i = 0; i < v; ++i) g0[i] = prior_mean(t, i) + sd[i] * rng.normal();
    const double s = ctx.obs.noise_var[t];
    const double e0 = std::sqrt(s) * rng.normal();
    const auto mt = ctx.m.row(t).transpose();
    const VectorXd dm = eq.omega.cwiseProduct(mt);
    const double denom = mt.dot(dm) + s;
    const double o = ctx.obs.response[t] - mt.dot(eq.gamma);
    eq.tvp.row(t) = (g0 + dm * ((o - mt.dot(g0) - e0) / denom)).transpose();
  }
}

MatrixXd state_innovations(const CheckedSpec& checked, Index j, const ModelData& data,
                           const EquationState& eq) {
  return eq.tvp - modifier_mean(modifier_matrix(checked, j, data, eq), eq.loadings);
}

void sample_state_variances(const CheckedSpec& checked, EquationState& eq, const MatrixXd& eta,
                            RngStream& rng) {
  if (checked.spec.zero_state_variance) {
    eq.omega.setZero();
    return;
  }
  const double lambda = 0.5 * (1.0 - static_cast<double>(eta.rows()));
  const VectorXd prior_var = prior_variance_for(eq.hs_sqrt_omega);
  for (Index i = 0; i < eq.omega.size(); ++i) {
    const double chi = std::max(eta.col(i).squaredNorm(), std::numeric_limits<double>::min());
    eq.omega[i] = sample_gig(lambda, chi, 1.0 / prior_var[i], rng);
  }
  update_horseshoe(eq.omega.cwiseSqrt(), eq.hs_sqrt_omega, rng, checked.spec.priors.horseshoe_cap);
}

void gibbs_sweep(const CheckedSpec& checked, const ModelData& data, SweepState& state,
                 std::uint64_t chain, SweepDiagnostics* diag) {
  const Index M = checked.dims.M;
  const double cap = checked.spec.priors.horseshoe_cap;
  if (diag) {
    diag->phi_accepted.assign(static_cast<std::size_t>(M), 0);
    diag->sigma2_accepted.assign(static_cast<std::size_t>(M), 0);
  }
  for (Index j = 0; j < M; ++j) {
    try {
      RngStream rng(checked.spec.mcmc.seed, {chain, static_cast<std::uint64_t>(state.sweep),
                                             static_cast<std::uint64_t>(j)});
      EquationState& eq = state.eq[j];
      const EquationContext ctx = make_context(checked, j, data, state);

      auto t0 = Clock::now();
      sample_z_block(checked, ctx, data, eq, rng);
      if (diag) diag->seconds.z += seconds_since(t0);

      t0 = Clock::now();
      sample_loadings_and_constants(checked, ctx, data, eq, rng);
      if (diag) diag->seconds.loadings += seconds_since(t0);

      t0 = Clock::now();
      sample_tvp_paths(checked, ctx, data, eq, rng);
      refresh_residuals(checked, data, state, j);
      if (diag) diag->seconds.tvp += seconds_since(t0);

      t0 = Clock::now();
      sample_state_variances(checked, eq, state_innovations(checked, j, data, eq), rng);
      if (diag) diag->seconds.omega += seconds_since(t0);

      t0 = Clock::now();
      SvProblem sv{state.resid.col(j), eq.log_vol, eq.sv, checked.spec.priors.sv};
      SvDraw draw = sample_sv_block(sv, rng);
      eq.log_vol = std::move(draw.log_vol);
      eq.sv = draw.params;
      if (diag) {
        diag->seconds.sv += seconds_since(t0);
        diag->phi_accepted[j] += draw.phi_accepted;
        diag->sigma2_accepted[j] += draw.sigma2_accepted;
      }

      t0 = Clock::now();
      update_horseshoe(eq.gamma, eq.hs_constants, rng, cap);
      if (eq.hs_loadings.size() > 0) {
        update_horseshoe(free_loadings(ctx.layout, eq.loadings), eq.hs_loadings, rng, cap);
      }
      if (diag) diag->seconds.shrinkage += seconds_since(t0);
    } catch (const ChainFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw ChainFailure("sweep " + std::to_string(state.sweep) + ", equation " +
                             std::to_string(j + 1) + ": " + e.what(),
                         state.sweep, j, nullptr);
    }
  }
  ++state.sweep;
}

SweepState initialize_state(const CheckedSpec& checked, const ModelData& data) {
  const auto& d = checked.dims;
  const auto& spec = checked.spec;
  const Index T = data.y.rows();
  SweepState s;
  s.resid = MatrixXd::Zero(T, d.M);
  s.eq.resize(static_cast<std::size_t>(d.M));
  const auto& tp = spec.priors.transition;
  for (Index j = 0; j < d.M; ++j) {
    EquationState& eq = s.eq[j];
    const ModifierLayout l = modifier_layout(checked, j);
    const Index v = d.v[j];
    const MatrixXd m = build_equation_regressors(j, data.x, s.resid);
    const MatrixXd gram = m.transpose() * m + MatrixXd::Identity(v, v);
    eq.gamma = gram.llt().solve(m.transpose() * data.y.col(j));
    eq.loadings = MatrixXd::Zero(v, l.width);
    eq.omega = VectorXd::Constant(v, spec.zero_state_variance ? 0.0 : 0.01);
    eq.tau = MatrixXd::Zero(T, l.width - l.tau);
    if (l.ms >= 0) eq.regime = Eigen::VectorXi::Zero(T);
    const double p00 = tp.e00 / (tp.e00 + tp.e01);
    const double p11 = tp.e10 / (tp.e10 + tp.e11);
    eq.transition << p00, 1.0 - p00, 1.0 - p11, p11;
    eq.tvp = MatrixXd::Zero(T, v);
    s.resid.col(j) = data.y.col(j) - m * eq.gamma;
    eq.log_vol = smoothed_log_square(s.resid.col(j));
    eq.sv = {eq.log_vol.mean(), 0.9, 0.1};
    eq.hs_constants = HorseshoeState::single_group(v);
    eq.hs_sqrt_omega = HorseshoeState::single_group(v);
    if (l.width == 0) eq.hs_loadings = HorseshoeState::single_group(0);
    else if (l.diagonal_tau) eq.hs_loadings = HorseshoeState::single_group(free_loading_count(l, v));
    else eq.hs_loadings = HorseshoeState::column_groups(v, l.width);
  }
  return s;
}

namespace {

void allocate(const CheckedSpec& checked, Index n, Index T, PosteriorDraws& out) {
  const auto& d = checked.dims;
  out.eq.resize(static_cast<std::size_t>(d.M));
  for (Index j = 0; j < d.M; ++j) {
    const ModifierLayout l = modifier_layout(checked, j);
    const Index v = d.v[j];
    const Index n_free = l.width > 0 ? free_loading_count(l, v) : 0;
    const Index groups = l.width == 0 ? 0 : (l.diagonal_tau ? 1 : l.width);
    EquationDraws& e = out.eq[j];
    e.gamma.resize(n, v);
    e.loadings.resize(n, v * l.width);
    e.omega.resize(n, v);
    e.tau.resize(n, T * (l.width - l.tau));
    e.regime.resize(n, l.ms >= 0 ? T : 0);
    e.transition.resize(n, l.ms >= 0 ? 2 : 0);
    e.log_vol.resize(n, T);
    e.sv.resize(n, 3);
    e.tvp.resize(n, T * v);
    e.hs_loadings_local.resize(n, n_free);
    e.hs_loadings_global.resize(n, groups);
    e.hs_constants_local.resize(n, v);
    e.hs_constants_global.resize(n, 1);
    e.hs_omega_local.resize(n, v);
    e.hs_omega_global.resize(n, 1);
  }
}

void shrink_to(Index n, PosteriorDraws& out) {
  for (EquationDraws& e : out.eq) {
    for (MatrixXd* m : {&e.gamma, &e.loadings, &e.omega, &e.tau, &e.regime, &e.transition,
                        &e.log_vol, &e.sv, &e.tvp, &e.hs_loadings_local, &e.hs_loadings_global,
                        &e.hs_constants_local, &e.hs_constants_global, &e.hs_omega_local,
                        &e.hs_omega_global}) {
      m->conservativeResize(n, m->cols());
    }
  }
  out.count = n;
}

}  // namespace

void store_draw(const SweepState& state, Index slot, PosteriorDraws& draws) {
  for (std::size_t j = 0; j < state.eq.size(); ++j) {
    const EquationState& s = state.eq[j];
    EquationDraws& e = draws.eq[j];
    e.gamma.row(slot) = s.gamma.transpose();
    e.loadings.row(slot) = s.loadings.reshaped().transpose();
    e.omega.row(slot) = s.omega.transpose();
    e.tau.row(slot) = s.tau.reshaped().transpose();
    if (e.regime.cols() > 0) {
      e.regime.row(slot) = s.regime.cast<double>().transpose();
      e.transition(slot, 0) = s.transition(0, 0);
      e.transition(slot, 1) = s.transition(1, 1);
    }
    e.log_vol.row(slot) = s.log_vol.transpose();
    e.sv.row(slot) << s.sv.mu, s.sv.phi, s.sv.sigma2;
    e.tvp.row(slot) = s.tvp.reshaped().transpose();
    e.hs_loadings_local.row(slot) = s.hs_loadings.local.transpose();
    e.hs_loadings_global.row(slot) = s.hs_loadings.global.transpose();
    e.hs_constants_local.row(slot) = s.hs_constants.local.transpose();
    e.hs_constants_global.row(slot) = s.hs_constants.global.transpose();
    e.hs_omega_local.row(slot) = s.hs_sqrt_omega.local.transpose();
    e.hs_omega_global.row(slot) = s.hs_sqrt_omega.global.transpose();
  }
}

EquationState PosteriorDraws::state_at(Index draw, Index j) const {
  if (draw < 0 || draw >= count) throw ValidationError("draw index out of range");
  const EquationDraws& e = eq[j];
  const Index T = dims.T;
  const Index v = dims.v[j];
  EquationState s;
  s.gamma = e.gamma.row(draw).transpose();
  s.loadings = e.loadings.row(draw).reshaped(v, e.loadings.cols() / v);
  s.omega = e.omega.row(draw).transpose();
  s.tau = e.tau.row(draw).reshaped(T, e.tau.cols() / T);
  if (e.regime.cols() > 0) {
    s.regime = e.regime.row(draw).transpose().cast<int>();
    const double p00 = e.transition(draw, 0);
    const double p11 = e.transition(draw, 1);
    s.transition << p00, 1.0 - p00, 1.0 - p11, p11;
  }
  s.log_vol = e.log_vol.row(draw).transpose();
  s.sv = {e.sv(draw, 0), e.sv(draw, 1), e.sv(draw, 2)};
  s.tvp = e.tvp.row(draw).reshaped(T, v);
  const auto restore = [draw](const MatrixXd& local, const MatrixXd& global,
                              HorseshoeState& hs, bool by_column, Index rows) {
    if (by_column && global.cols() > 1) hs = HorseshoeState::column_groups(rows, global.cols());
    else hs = HorseshoeState::single_group(local.cols());
    hs.local = local.row(draw).transpose();
    hs.global = global.row(draw).transpose();
  };
  restore(e.hs_loadings_local, e.hs_loadings_global, s.hs_loadings, true, v);
  restore(e.hs_constants_local, e.hs_constants_global, s.hs_constants, false, v);
  restore(e.hs_omega_local, e.hs_omega_global, s.hs_sqrt_omega, false, v);
  return s;
}

PosteriorDraws run_chain(const CheckedSpec& checked, const DataPanel& panel, std::uint64_t chain) {
  const auto start = Clock::now();
  const ModelData data = make_model_data(checked, panel);
  const auto& mc = checked.spec.mcmc;
  const Index T = data.y.rows();
  const Index M = checked.dims.M;

  auto out = std::make_shared<PosteriorDraws>();
  out->spec = checked.spec;
  out->dims = checked.dims;
  out->spec_hash = spec_hash(checked.spec);
  out->seed = mc.seed;
  out->y_tail = panel.y.bottomRows(checked.dims.P);
  out->modifiers = data.r;
  if (panel.next_modifiers) out->next_modifiers = *panel.next_modifiers;
  out->variable_names = panel.variable_names;
  if (!panel.dates.empty()) out->dates.assign(panel.dates.begin() + checked.dims.P, panel.dates.end());
  allocate(checked, mc.stored(), T, *out);

  SweepState state = initialize_state(checked, data);
  SweepDiagnostics sweep_diag;
  std::vector<Index> phi_acc(static_cast<std::size_t>(M), 0), sig_acc(static_cast<std::size_t>(M), 0);
  Index stored = 0;
  for (Index s = 0; s < mc.draws; ++s) {
    try {
      gibbs_sweep(checked, data, state, chain, &sweep_diag);
    } catch (const ChainFailure& f) {
      shrink_to(stored, *out);
      throw ChainFailure(f.what(), f.sweep(), f.equation(), out);
    }
    for (Index j = 0; j < M; ++j) {
      phi_acc[j] += sweep_diag.phi_accepted[j];
      sig_acc[j] += sweep_diag.sigma2_accepted[j];
    }
    if (s >= mc.burn && (s - mc.burn) % mc.thin == mc.thin - 1) store_draw(state, stored++, *out);
  }
  out->count = stored;
  auto& diag = out->diagnostics;
  diag.seconds = sweep_diag.seconds;
  for (Index j = 0; j < M; ++j) {
    diag.phi_acceptance.push_back(static_cast<double>(phi_acc[j]) / static_cast<double>(mc.draws));
    diag.sigma2_acceptance.push_back(static_cast<double>(sig_acc[j]) / static_cast<double>(mc.draws));
  }
  diag.wall_seconds = seconds_since(start);
  return std::move(*out);
}

NormalizedModifiers normalize_modifiers(const MatrixXd& z, const MatrixXd& loadings) {
  if (loadings.cols() != z.cols()) throw ValidationError("loadings and modifiers disagree in width");
  NormalizedModifiers out;
  out.z = z;
  out.loadings = loadings;
  out.intercept = VectorXd::Zero(loadings.rows());
  out.degenerate.assign(static_cast<std::size_t>(z.cols()), false);
  for (Index c = 0; c < z.cols(); ++c) {
    const double lo = z.col(c).minCoeff();
    const double hi = z.col(c).maxCoeff();
    const double range = hi - lo;
    if (!(range > 0.0)) {
      out.degenerate[c] = true;
      continue;
    }
    out.z.col(c) = (z.col(c).array() - lo) / range;
    out.loadings.col(c) = loadings.col(c) * range;
    out.intercept += loadings.col(c) * lo;
  }
  return out;
}

}  // namespace emvar
