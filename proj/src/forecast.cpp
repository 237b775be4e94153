#include "emvar/forecast.hpp"

#include "emvar/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <thread>
#include <tuple>

namespace emvar {

std::string to_string(ModelClass c) { return c == ModelClass::var ? "VAR" : "NS-VAR"; }

ModelClass parse_model_class(const std::string& text) {
  if (text == "VAR") return ModelClass::var;
  if (text == "NS-VAR") return ModelClass::ns_var;
  throw ValidationError("unknown model class '" + text + "' (expected VAR or NS-VAR)");
}

PredictivePath simulate_predictive(const PosteriorDraws& draws, Index draw, Index h,
                                   RngStream& rng) {
  if (h < 1) throw ValidationError("forecast horizon must be at least 1");
  if (draw < 0 || draw >= draws.count) throw ValidationError("draw index out of range");
  const auto& d = draws.dims;
  const Index M = d.M, K = d.K, T = d.T;
  const Index R_r = d.R_r;

  VectorXd r(R_r);
  if (R_r > 0) {
    if (draws.next_modifiers.size() == R_r) r = draws.next_modifiers;
    else r = draws.modifiers.row(draws.modifiers.rows() - 1).transpose();
  }

  struct Eq {
    VectorXd gamma, omega_sd, tau;
    MatrixXd loadings;
    int regime = 0;
    double p00 = 0.5, p11 = 0.5;
    double log_vol = 0.0;
    SvParams sv;
    Index ms = -1;
  };
  std::vector<Eq> eqs(static_cast<std::size_t>(M));
  for (Index j = 0; j < M; ++j) {
    const EquationDraws& e = draws.eq[j];
    const Index v = d.v[j];
    Eq& q = eqs[j];
    q.gamma = e.gamma.row(draw).transpose();
    q.omega_sd = e.omega.row(draw).transpose().cwiseSqrt();
    q.loadings = e.loadings.row(draw).reshaped(v, e.loadings.cols() / v);
    const Index n_tau = e.tau.cols() / T;
    q.tau.resize(n_tau);
    for (Index c = 0; c < n_tau; ++c) q.tau[c] = e.tau(draw, c * T + T - 1);
    if (e.regime.cols() > 0) {
      q.ms = R_r;
      q.regime = static_cast<int>(e.regime(draw, T - 1));
      q.p00 = e.transition(draw, 0);
      q.p11 = e.transition(draw, 1);
    }
    q.log_vol = e.log_vol(draw, T - 1);
    q.sv = {e.sv(draw, 0), e.sv(draw, 1), e.sv(draw, 2)};
  }

  VectorXd x(K);
  for (Index lag = 1; lag <= d.P; ++lag) {
    x.segment((lag - 1) * M, M) = draws.y_tail.row(d.P - lag).transpose();
  }

  PredictivePath out;
  out.y.resize(h, M);
  out.mean.resize(h, M);
  out.cov.reserve(static_cast<std::size_t>(h));
  VectorXd y(M), eps(M), var(M);
  MatrixXd C = MatrixXd::Identity(M, M);
  for (Index s = 0; s < h; ++s) {
    for (Index j = 0; j < M; ++j) {
      Eq& q = eqs[j];
      for (Index c = 0; c < q.tau.size(); ++c) q.tau[c] += rng.normal();
      if (q.ms >= 0) {
        const double stay = q.regime == 0 ? q.p00 : q.p11;
        if (rng.uniform() >= stay) q.regime = 1 - q.regime;
      }
      q.log_vol = q.sv.mu + q.sv.phi * (q.log_vol - q.sv.mu) + std::sqrt(q.sv.sigma2) * rng.normal();

      VectorXd z(q.loadings.cols());
      if (R_r > 0) z.head(R_r) = r;
      if (q.ms >= 0) z[q.ms] = q.regime;
      if (q.tau.size() > 0) z.tail(q.tau.size()) = q.tau;
      VectorXd b = q.gamma + q.loadings * z;
      for (Index i = 0; i < b.size(); ++i) b[i] += q.omega_sd[i] * rng.normal();

      const double mean = b.head(K).dot(x);
      double shock = 0.0;
      for (Index l = 0; l < j; ++l) {
        C(j, l) = b[K + l];
        shock += b[K + l] * eps[l];
      }
      var[j] = std::exp(q.log_vol);
      eps[j] = std::sqrt(var[j]) * rng.normal();
      out.mean(s, j) = mean;
      y[j] = mean + shock + eps[j];
    }
    out.y.row(s) = y.transpose();
    out.cov.push_back(C * var.asDiagonal() * C.transpose());
    if (K > M) {
      const VectorXd older = x.head(K - M);
      x.tail(K - M) = older;
    }
    x.head(M) = y;
  }
  return out;
}

std::vector<PredictiveSample> predictive_sample(const PosteriorDraws& draws,
                                                const std::vector<Index>& horizons,
                                                const TargetMap& map, std::uint64_t seed) {
  if (horizons.empty()) throw ValidationError("no forecast horizons given");
  const Index H = *std::max_element(horizons.begin(), horizons.end());
  const Index n = draws.count;
  const Index n_t = map.A.rows();
  if (map.A.cols() != draws.dims.M) throw ValidationError("target map width differs from M");
  std::vector<PredictiveSample> out(horizons.size());
  for (auto& p : out) {
    p.value.resize(n, n_t);
    p.mean.resize(n, n_t);
    p.var.resize(n, n_t);
    p.cov.resize(static_cast<std::size_t>(n));
  }
  for (Index d = 0; d < n; ++d) {
    RngStream rng(seed, {0, static_cast<std::uint64_t>(d), 1});
    const PredictivePath path = simulate_predictive(draws, d, H, rng);
    for (std::size_t k = 0; k < horizons.size(); ++k) {
      const Index s = horizons[k] - 1;
      VectorXd value = map.A * path.y.row(s).transpose();
      VectorXd mean = map.A * path.mean.row(s).transpose();
      if (map.base) {
        const VectorXd before = map.A * path.y.topRows(s).colwise().sum().transpose();
        value = *map.base + before + value;
        mean = *map.base + before + mean;
      }
      const MatrixXd cov = map.A * path.cov[s] * map.A.transpose();
      out[k].value.row(d) = value.transpose();
      out[k].mean.row(d) = mean.transpose();
      out[k].var.row(d) = cov.diagonal().transpose();
      out[k].cov[d] = cov;
    }
  }
  return out;
}

double score_rmse(const VectorXd& forecasts, const VectorXd& realized) {
  if (forecasts.size() == 0) throw ValidationError("RMSE of an empty sample");
  if (forecasts.size() != realized.size()) throw ValidationError("RMSE inputs differ in length");
  return std::sqrt((forecasts - realized).squaredNorm() / static_cast<double>(forecasts.size()));
}

namespace {

double log_mean_exp(const std::vector<double>& terms) {
  const double top = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(top)) return kLogFloor;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return std::max(kLogFloor, top + std::log(acc / static_cast<double>(terms.size())));
}

}  // namespace

double mixture_log_density(const VectorXd& means, const VectorXd& vars, double y) {
  if (means.size() == 0 || vars.size() != means.size()) {
    throw ValidationError("mixture needs equal, nonzero numbers of means and variances");
  }
  std::vector<double> terms(static_cast<std::size_t>(means.size()));
  for (Index d = 0; d < means.size(); ++d) {
    const double e = y - means[d];
    terms[d] = -0.5 * std::log(2.0 * std::numbers::pi * vars[d]) - 0.5 * e * e / vars[d];
  }
  return log_mean_exp(terms);
}

double mixture_log_density(const std::vector<VectorXd>& means, const std::vector<MatrixXd>& covs,
                           const VectorXd& y) {
  if (means.empty() || covs.size() != means.size()) {
    throw ValidationError("mixture needs equal, nonzero numbers of means and covariances");
  }
  const double k = static_cast<double>(y.size());
  std::vector<double> terms(means.size());
  for (std::size_t d = 0; d < means.size(); ++d) {
    const Eigen::LLT<MatrixXd> llt(covs[d]);
    if (llt.info() != Eigen::Success) throw NumericalError("predictive covariance not positive definite");
    const VectorXd w = llt.matrixL().solve(y - means[d]);
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    terms[d] = -0.5 * (k * std::log(2.0 * std::numbers::pi) + logdet + w.squaredNorm());
  }
  return log_mean_exp(terms);
}

double score_lpbf(const VectorXd& model_log, const VectorXd& benchmark_log) {
  if (model_log.size() == 0 || model_log.size() != benchmark_log.size()) {
    throw ValidationError("LPBF needs equal, nonzero numbers of log scores");
  }
  return (model_log - benchmark_log).mean();
}

std::uint64_t chain_seed(std::uint64_t seed, const std::string& spec, Index origin) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (unsigned char c : spec) mix(c);
  for (int i = 0; i < 8; ++i) mix((static_cast<std::uint64_t>(origin) >> (8 * i)) & 0xff);
  for (int i = 0; i < 8; ++i) mix((seed >> (8 * i)) & 0xff);
  // splitmix64 finalizer
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

namespace {

DataPanel head_panel(const DataPanel& p, Index last_row) {
  DataPanel out;
  const Index n = last_row + 1;
  out.y = p.y.topRows(n);
  out.modifiers = p.modifiers.cols() > 0 ? MatrixXd(p.modifiers.topRows(n)) : MatrixXd(n, 0);
  if (!p.dates.empty()) out.dates.assign(p.dates.begin(), p.dates.begin() + n);
  out.variable_names = p.variable_names;
  out.modifier_names = p.modifier_names;
  if (p.modifiers.cols() > 0) {
    if (n < p.modifiers.rows()) out.next_modifiers = p.modifiers.row(n).transpose();
    else if (p.next_modifiers) out.next_modifiers = p.next_modifiers;
  }
  return out;
}

std::vector<ForecastRecord> forecast_one(const EvalSpec& es, const EvaluationInput& in, Index origin) {
  const ClassData* cd = es.model_class == ModelClass::var ? (in.var ? &*in.var : nullptr)
                                                          : (in.ns_var ? &*in.ns_var : nullptr);
  if (!cd) throw ValidationError("no data supplied for model class " + to_string(es.model_class));
  std::vector<Index> horizons;
  for (Index h : in.horizons) {
    if (origin + h < in.realized.rows()) horizons.push_back(h);
  }
  std::vector<ForecastRecord> out;
  if (horizons.empty()) return out;
  const auto base_record = [&](Index h) {
    ForecastRecord r;
    r.spec = es.name;
    r.model_class = es.model_class;
    r.origin = origin;
    r.horizon = h;
    r.realized = in.realized.row(origin + h).transpose();
    return r;
  };
  try {
    ModelSpec spec = es.spec;
    spec.M = cd->panel.variables();
    spec.R_r = spec.include_obs ? cd->panel.modifier_count() : 0;
    spec.mcmc.seed = chain_seed(in.seed, es.name, origin);
    const DataPanel panel = head_panel(cd->panel, origin);
    const CheckedSpec checked = validate_spec(spec, panel);
    const PosteriorDraws draws = run_chain(checked, panel);
    TargetMap map{cd->target_map, std::nullopt};
    if (in.cumulate) map.base = in.realized.row(origin).transpose();
    const auto samples = predictive_sample(draws, horizons, map, spec.mcmc.seed ^ 0x5851f42d4c957f2dULL);
    for (std::size_t k = 0; k < horizons.size(); ++k) {
      const PredictiveSample& ps = samples[k];
      ForecastRecord r = base_record(horizons[k]);
      r.ok = true;
      r.draws = ps.value;
      r.point = ps.value.colwise().mean().transpose();
      r.log_score.resize(r.realized.size());
      for (Index i = 0; i < r.realized.size(); ++i) {
        r.log_score[i] = mixture_log_density(ps.mean.col(i), ps.var.col(i), r.realized[i]);
      }
      if (in.joint_score) {
        std::vector<VectorXd> means;
        for (Index d = 0; d < ps.mean.rows(); ++d) means.push_back(ps.mean.row(d).transpose());
        r.joint_log_score = mixture_log_density(means, ps.cov, r.realized);
      }
      out.push_back(std::move(r));
    }
  } catch (const std::exception& e) {
    out.clear();
    for (Index h : horizons) {
      ForecastRecord r = base_record(h);
      r.failure = e.what();
      out.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace

std::vector<ForecastRecord> run_recursive_forecasts(const std::vector<EvalSpec>& grid,
                                                    const EvaluationInput& in) {
  if (in.first_origin < 0 || in.last_origin < in.first_origin || in.last_origin >= in.realized.rows()) {
    throw ValidationError("evaluation window is empty or outside the panel");
  }
  for (const EvalSpec& es : grid) {
    if (!(es.model_class == ModelClass::var ? in.var : in.ns_var)) {
      throw ValidationError("no data supplied for model class " + to_string(es.model_class));
    }
  }
  const Index n_origin = in.last_origin - in.first_origin + 1;
  const std::size_t n_task = grid.size() * static_cast<std::size_t>(n_origin);
  std::vector<std::vector<ForecastRecord>> results(n_task);
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t k = next++; k < n_task; k = next++) {
      const std::size_t s = k / static_cast<std::size_t>(n_origin);
      const Index o = in.first_origin + static_cast<Index>(k % static_cast<std::size_t>(n_origin));
      results[k] = forecast_one(grid[s], in, o);
    }
  };
  const int threads = std::max(1, in.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<ForecastRecord> out;
  for (auto& r : results) {
    for (auto& rec : r) out.push_back(std::move(rec));
  }
  return out;
}

ScoreTable score_records(const std::vector<EvalSpec>& grid, const EvaluationInput& in,
                         const std::vector<ForecastRecord>& records) {
  const auto bench_it = std::find_if(grid.begin(), grid.end(),
                                     [&](const EvalSpec& s) { return s.name == in.benchmark; });
  if (bench_it == grid.end()) throw ValidationError("benchmark spec '" + in.benchmark + "' is not in the grid");

  std::map<std::tuple<std::string, Index, Index>, const ForecastRecord*> index;
  for (const auto& r : records) {
    if (r.ok) index[{r.spec, r.origin, r.horizon}] = &r;
  }
  ScoreTable table;
  table.targets = in.target_names;
  table.horizons = in.horizons;
  const Index n_t = in.realized.cols();
  for (const auto& spec : grid) {
    table.specs.push_back(spec.name);
    std::vector<std::vector<ScoreCell>> per_h;
    std::vector<ScoreCell> joint_h;
    for (Index h : in.horizons) {
      std::vector<const ForecastRecord*> mine, bench;
      for (Index o = in.first_origin; o <= in.last_origin; ++o) {
        const auto a = index.find({spec.name, o, h});
        const auto b = index.find({in.benchmark, o, h});
        if (a == index.end() || b == index.end()) continue;
        mine.push_back(a->second);
        bench.push_back(b->second);
      }
      const Index n = static_cast<Index>(mine.size());
      std::vector<ScoreCell> cells(static_cast<std::size_t>(n_t));
      ScoreCell joint;
      if (n > 0) {
        for (Index i = 0; i < n_t; ++i) {
          VectorXd pm(n), pb(n), real(n), lm(n), lb(n);
          for (Index o = 0; o < n; ++o) {
            pm[o] = mine[o]->point[i];
            pb[o] = bench[o]->point[i];
            real[o] = mine[o]->realized[i];
            lm[o] = mine[o]->log_score[i];
            lb[o] = bench[o]->log_score[i];
          }
          cells[i] = {score_rmse(pm, real) / score_rmse(pb, real), score_lpbf(lm, lb), n};
        }
        if (in.joint_score) {
          VectorXd lm(n), lb(n);
          for (Index o = 0; o < n; ++o) {
            lm[o] = mine[o]->joint_log_score;
            lb[o] = bench[o]->joint_log_score;
          }
          joint = {std::numeric_limits<double>::quiet_NaN(), score_lpbf(lm, lb), n};
        }
      } else {
        for (auto& c : cells) c = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), 0};
      }
      per_h.push_back(std::move(cells));
      joint_h.push_back(joint);
    }
    table.cells.push_back(std::move(per_h));
    table.joint.push_back(std::move(joint_h));
  }
  return table;
}

EvaluationResult recursive_evaluate(const std::vector<EvalSpec>& grid, const EvaluationInput& in) {
  if (std::none_of(grid.begin(), grid.end(), [&](const EvalSpec& s) { return s.name == in.benchmark; })) {
    throw ValidationError("benchmark spec '" + in.benchmark + "' is not in the grid");
  }
  EvaluationResult out;
  out.records = run_recursive_forecasts(grid, in);
  out.table = score_records(grid, in, out.records);
  return out;
}

}  // namespace emvar
