#include "emvar/dgp.hpp"
#include "emvar/errors.hpp"
#include "emvar/forecast.hpp"
#include "emvar/gibbs.hpp"
#include "emvar/io.hpp"
#include "emvar/longrun.hpp"
#include "emvar/nelson_siegel.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

namespace fs = std::filesystem;
using namespace emvar;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
  std::string draws;
  std::string data;
};

RunConfig load(const Options& o, bool need_config) {
  RunConfig c;
  if (!o.config.empty()) c = read_config(o.config);
  else if (need_config) throw ValidationError("--config is required for this command");
  if (o.seed) c.spec.mcmc.seed = *o.seed;
  if (o.threads) c.threads = *o.threads;
  if (!o.out.empty()) c.out = o.out;
  if (!o.draws.empty()) c.draws_dir = o.draws;
  if (!o.data.empty()) c.data = o.data;
  return c;
}

fs::path out_dir(const RunConfig& c) {
  if (c.out.empty()) throw ValidationError("no output directory (set 'out' or pass --out)");
  fs::create_directories(c.out);
  return c.out;
}

fs::path draws_dir(const RunConfig& c) {
  if (!c.draws_dir.empty()) return c.draws_dir;
  if (c.out.empty()) throw ValidationError("no draws directory (set 'draws_dir', --draws or --out)");
  return fs::path(c.out) / "draws";
}

// Refuses to write any output over an input file.
void check_no_overlap(const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
  for (const auto& out : outputs) {
    const fs::path o = fs::weakly_canonical(out);
    for (const auto& in : inputs) {
      if (!in.empty() && fs::weakly_canonical(in) == o) {
        throw ValidationError("output path " + out.string() + " overlaps input " + in.string());
      }
    }
  }
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ValidationError("cannot write " + p.string());
  return f;
}

DataPanel read_data(const RunConfig& c) {
  if (c.data.empty()) throw ValidationError("no data file (set 'data')");
  return read_panel_csv(c.data);
}

// Model-unit panel for one class: the series themselves, or NS factors of a
// yield panel.
DataPanel class_panel(const DataPanel& panel, ModelClass mc, const NsConfig& ns) {
  if (mc == ModelClass::var) return panel;
  check_ns_config(ns);
  if (panel.variables() != static_cast<Index>(ns.maturities.size())) {
    throw ValidationError("NS-VAR needs one yield column per maturity (" + std::to_string(ns.maturities.size()) +
                          "), data has " + std::to_string(panel.variables()));
  }
  DataPanel out = panel;
  out.y = extract_factors(panel.y, ns);
  out.variable_names = {"level", "slope", "curvature"};
  return out;
}

int cmd_estimate(const Options& o) {
  RunConfig c = load(o, true);
  const fs::path out = out_dir(c);
  const fs::path dd = draws_dir(c);
  check_no_overlap({c.data}, {dd, out / "summary.json"});
  const PreparedPanel prepared = prepare_panel(read_data(c), c.difference);
  const DataPanel panel = class_panel(prepared.panel, c.model_class, c.ns);
  ModelSpec spec = c.spec;
  spec.M = panel.variables();
  spec.R_r = spec.include_obs ? panel.modifier_count() : 0;
  const CheckedSpec checked = validate_spec(spec, panel);
  spdlog::info("estimating {} on {} rows ({} sweeps)", describe(spec), panel.rows(), spec.mcmc.draws);
  PosteriorDraws draws;
  try {
    draws = run_chain(checked, panel);
  } catch (const ChainFailure& e) {
    if (e.partial() && e.partial()->count > 0) {
      write_draws(dd / "partial", *e.partial());
      spdlog::error("chain failed; {} partial draws written to {}", e.partial()->count, (dd / "partial").string());
    }
    throw;
  }
  write_draws(dd, draws);
  write_summary(out / "summary.json", draws);
  write_normalized_modifiers(out / "modifiers", draws);
  spdlog::info("{} draws written to {} ({:.1f}s)", draws.count, dd.string(), draws.diagnostics.wall_seconds);
  return 0;
}

int cmd_forecast(const Options& o) {
  RunConfig c = load(o, false);
  const fs::path out = out_dir(c);
  const PosteriorDraws draws = read_draws(draws_dir(c));
  const Index M = draws.dims.M;
  const TargetMap map{MatrixXd::Identity(M, M), std::nullopt};
  const auto samples = predictive_sample(draws, c.horizons, map, c.spec.mcmc.seed);
  auto f = open_out(out / "forecast.csv");
  f << "horizon,variable,mean,median,q16,q84\n";
  for (std::size_t k = 0; k < c.horizons.size(); ++k) {
    for (Index i = 0; i < M; ++i) {
      const VectorXd col = samples[k].value.col(i);
      const std::vector<double> v(col.data(), col.data() + col.size());
      f << c.horizons[k] << ',' << draws.variable_names[i] << ',' << format_number(col.mean()) << ','
        << format_number(quantile(v, 0.5)) << ',' << format_number(quantile(v, 0.16)) << ','
        << format_number(quantile(v, 0.84)) << '\n';
    }
  }
  return 0;
}

Index find_date(const std::vector<std::string>& dates, const std::string& d, const char* what) {
  if (d.empty()) throw ValidationError(std::string("evaluate needs '") + what + "'");
  for (std::size_t t = 0; t < dates.size(); ++t) {
    if (dates[t] == d) return static_cast<Index>(t);
  }
  throw ValidationError(std::string(what) + " date '" + d + "' is not in the (transformed) panel");
}

int cmd_evaluate(const Options& o) {
  RunConfig c = load(o, true);
  if (c.grid.empty()) throw ValidationError("evaluate needs at least one 'spec' grid line");
  if (c.benchmark.empty()) throw ValidationError("evaluate needs a 'benchmark' spec name");
  const fs::path out = out_dir(c);
  check_no_overlap({c.data}, {out / "scores.csv", out / "records.csv"});
  const PreparedPanel prepared = prepare_panel(read_data(c), c.difference);
  const DataPanel& panel = prepared.panel;

  EvaluationInput in;
  bool need_var = false, need_ns = false;
  for (const auto& es : c.grid) (es.model_class == ModelClass::var ? need_var : need_ns) = true;
  const Index M = panel.variables();
  if (need_var) in.var = ClassData{panel, MatrixXd::Identity(M, M)};
  if (need_ns) in.ns_var = ClassData{class_panel(panel, ModelClass::ns_var, c.ns), ns_loading_matrix(c.ns)};
  in.cumulate = c.difference;
  in.realized = c.difference ? prepared.levels : panel.y;
  in.target_names = panel.variable_names;
  in.horizons = c.horizons;
  in.first_origin = find_date(panel.dates, c.first_origin, "first_origin");
  in.last_origin = find_date(panel.dates, c.last_origin, "last_origin");
  in.benchmark = c.benchmark;
  in.joint_score = c.joint_score;
  in.seed = c.spec.mcmc.seed;
  in.threads = c.threads;
  spdlog::info("evaluating {} specs over origins {}..{}", c.grid.size(), c.first_origin, c.last_origin);

  const EvaluationResult res = recursive_evaluate(c.grid, in);
  std::size_t failed = 0;
  for (const auto& r : res.records) {
    if (!r.ok) {
      ++failed;
      spdlog::debug("{} origin {} h={} failed: {}", r.spec, r.origin, r.horizon, r.failure);
    }
  }
  if (failed > 0) spdlog::warn("{} forecast records failed and were excluded from scoring", failed);
  auto scores = open_out(out / "scores.csv");
  write_score_table(scores, res.table, c.grid);
  auto records = open_out(out / "records.csv");
  write_forecast_records(records, res.records, in.target_names, panel.dates);
  return 0;
}

nlohmann::json vec_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int cmd_simulate(const Options& o) {
  RunConfig c = load(o, false);
  const fs::path out = out_dir(c);
  ModelSpec spec = c.spec;
  spec.M = c.sim_M;
  if (spec.include_obs && spec.R_r == 0) spec.R_r = 1;
  RngStream rng(spec.mcmc.seed, StreamId{0, 0, 0});
  const SimulatedPanel sim = simulate_dgp(spec, std::nullopt, c.sim_T, rng);
  if (!truth_is_stable(check_for_simulation(spec, c.sim_T), sim.truth)) {
    spdlog::warn("the simulated coefficients are explosive at some t; the panel may not be usable");
  }
  write_panel_csv(out / "panel.csv", unlag_modifiers(sim.panel));

  nlohmann::json truth = {{"spec", describe(spec)}, {"seed", spec.mcmc.seed}, {"equations", nlohmann::json::array()}};
  for (const auto& eq : sim.truth.state.eq) {
    const VectorXd vec_loadings = eq.loadings.reshaped();
    truth["equations"].push_back({{"gamma", vec_json(eq.gamma)},
                                  {"loadings", vec_json(vec_loadings)},
                                  {"omega", vec_json(eq.omega)},
                                  {"sv", {eq.sv.mu, eq.sv.phi, eq.sv.sigma2}}});
  }
  open_out(out / "truth.json") << truth.dump(2) << '\n';
  return 0;
}

int cmd_extract_ns(const Options& o) {
  RunConfig c = load(o, false);
  const fs::path out = out_dir(c);
  check_no_overlap({c.data}, {out / "factors.csv", out / "ns_fit.csv"});
  const DataPanel panel = read_data(c);
  check_ns_config(c.ns);
  const DataPanel factors = class_panel(panel, ModelClass::ns_var, c.ns);
  const MatrixXd fitted = reconstruct_yields(factors.y, c.ns);
  auto f = open_out(out / "factors.csv");
  f << "date,level,slope,curvature\n";
  auto r = open_out(out / "ns_fit.csv");
  r << "date,rmse,max_abs_residual\n";
  for (Index t = 0; t < panel.rows(); ++t) {
    f << panel.dates[t];
    for (Index k = 0; k < 3; ++k) f << ',' << format_number(factors.y(t, k));
    f << '\n';
    const VectorXd e = panel.y.row(t) - fitted.row(t);
    r << panel.dates[t] << ',' << format_number(std::sqrt(e.squaredNorm() / static_cast<double>(e.size()))) << ','
      << format_number(e.cwiseAbs().maxCoeff()) << '\n';
  }
  return 0;
}

int cmd_longrun(const Options& o) {
  RunConfig c = load(o, false);
  const fs::path out = out_dir(c);
  const PosteriorDraws draws = read_draws(draws_dir(c));
  const auto rows = longrun_paths(draws);
  Index dropped = 0;
  for (const auto& r : rows) dropped = std::max(dropped, r.n_dropped);
  if (dropped > 0) spdlog::warn("up to {} of {} draws were nonstationary at some t and dropped", dropped, draws.count);
  auto f = open_out(out / "longrun.csv");
  write_longrun_csv(f, rows, draws);
  return 0;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("emvar");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("TVP_LOG_LEVEL")) {
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "info") spdlog::set_level(spdlog::level::info);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("TVP_LOG_LEVEL '{}' is not one of error, info, debug; using info", level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Bayesian VAR with effect-modified time-varying coefficients"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "configuration file");
    sub->add_option("--seed", o.seed, "RNG seed, overrides the config");
    sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", o.out, "output directory");
    return sub;
  };
  auto* estimate = common(app.add_subcommand("estimate", "run the Gibbs sampler and store posterior draws"));
  auto* forecast = common(app.add_subcommand("forecast", "predictive summaries from stored draws"));
  forecast->add_option("--draws", o.draws, "draws directory");
  auto* evaluate = common(app.add_subcommand("evaluate", "recursive out-of-sample evaluation of a spec grid"));
  auto* simulate = common(app.add_subcommand("simulate", "simulate a panel from the prior"));
  auto* extract = common(app.add_subcommand("extract-ns", "Nelson-Siegel factors from a yield panel"));
  extract->add_option("--data", o.data, "yield CSV");
  auto* longrun = common(app.add_subcommand("longrun", "long-run correlation paths from stored draws"));
  longrun->add_option("--draws", o.draws, "draws directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*estimate) return cmd_estimate(o);
    if (*forecast) return cmd_forecast(o);
    if (*evaluate) return cmd_evaluate(o);
    if (*simulate) return cmd_simulate(o);
    if (*extract) return cmd_extract_ns(o);
    if (*longrun) return cmd_longrun(o);
  } catch (const ValidationError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const NumericalError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
