#include "emvar/io.hpp"

#include "emvar/errors.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace emvar {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool parse_double(const std::string& text, double& out) {
  if (text == "inf" || text == "Inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, out);
  return res.ec == std::errc() && res.ptr == end && !text.empty();
}

std::string modifier_prefix() { return "mod_"; }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

DataPanel parse_panel_csv(std::istream& in, const std::string& source) {
  std::string line;
  Index line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split(trim(line), ',');
      break;
    }
  }
  if (header.size() < 2) throw ValidationError(source + ": header needs a date column and at least one series");
  std::vector<Index> endo, mods;
  DataPanel panel;
  std::set<std::string> names;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty()) throw ValidationError(source + ":" + std::to_string(line_no) + ": empty column name");
    if (!names.insert(header[c]).second) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": duplicate column '" + header[c] + "'");
    }
    if (header[c].rfind(modifier_prefix(), 0) == 0) {
      mods.push_back(static_cast<Index>(c));
      panel.modifier_names.push_back(header[c].substr(modifier_prefix().size()));
    } else {
      endo.push_back(static_cast<Index>(c));
      panel.variable_names.push_back(header[c]);
    }
  }
  if (endo.empty()) throw ValidationError(source + ": no endogenous columns");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size()) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    if (!panel.dates.empty() && !(panel.dates.back() < cells[0])) {
      throw ValidationError(source + ":" + std::to_string(line_no) + ": date '" + cells[0] +
                            "' does not follow '" + panel.dates.back() + "'");
    }
    panel.dates.push_back(cells[0]);
    std::vector<double> row(header.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c - 1]) || !std::isfinite(row[c - 1])) {
        throw ValidationError(source + ":" + std::to_string(line_no) + ": column '" + header[c] +
                              "' has missing or non-numeric value '" + cells[c] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const Index T = static_cast<Index>(rows.size());
  panel.y.resize(T, static_cast<Index>(endo.size()));
  panel.modifiers.resize(T, static_cast<Index>(mods.size()));
  for (Index t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < endo.size(); ++k) panel.y(t, static_cast<Index>(k)) = rows[t][endo[k] - 1];
    for (std::size_t k = 0; k < mods.size(); ++k) panel.modifiers(t, static_cast<Index>(k)) = rows[t][mods[k] - 1];
  }
  return panel;
}

DataPanel read_panel_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open data file " + path.string());
  return parse_panel_csv(in, path.string());
}

void write_panel_csv(const fs::path& path, const DataPanel& panel) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "date";
  for (const auto& n : panel.variable_names) out << ',' << n;
  for (const auto& n : panel.modifier_names) out << ',' << modifier_prefix() << n;
  out << '\n';
  for (Index t = 0; t < panel.rows(); ++t) {
    out << (panel.dates.empty() ? std::to_string(t + 1) : panel.dates[t]);
    for (Index j = 0; j < panel.y.cols(); ++j) out << ',' << format_number(panel.y(t, j));
    for (Index c = 0; c < panel.modifiers.cols(); ++c) out << ',' << format_number(panel.modifiers(t, c));
    out << '\n';
  }
}

PreparedPanel prepare_panel(const DataPanel& raw, bool difference) {
  check_panel(raw);
  const Index T = raw.rows();
  const bool drop = difference || raw.modifier_count() > 0;
  PreparedPanel out;
  if (!drop) {
    out.panel = raw;
    out.levels = raw.y;
    return out;
  }
  if (T < 2) throw ValidationError("need at least 2 rows to difference or lag");
  DataPanel& p = out.panel;
  p.variable_names = raw.variable_names;
  p.modifier_names = raw.modifier_names;
  if (!raw.dates.empty()) p.dates.assign(raw.dates.begin() + 1, raw.dates.end());
  out.levels = raw.y.bottomRows(T - 1);
  p.y = difference ? MatrixXd(raw.y.bottomRows(T - 1) - raw.y.topRows(T - 1)) : out.levels;
  p.modifiers = raw.modifiers.topRows(T - 1);
  if (raw.modifier_count() > 0) p.next_modifiers = raw.modifiers.row(T - 1).transpose();
  return out;
}

DataPanel unlag_modifiers(const DataPanel& model_panel) {
  DataPanel raw = model_panel;
  const Index T = model_panel.rows();
  const Index R = model_panel.modifier_count();
  raw.next_modifiers.reset();
  if (R == 0 || T == 0) return raw;
  if (T > 1) raw.modifiers.topRows(T - 1) = model_panel.modifiers.bottomRows(T - 1);
  if (model_panel.next_modifiers) raw.modifiers.row(T - 1) = model_panel.next_modifiers->transpose();
  else raw.modifiers.row(T - 1) = model_panel.modifiers.row(T - 1);
  return raw;
}

namespace {

class ConfigError {
 public:
  ConfigError(std::string source, Index line) : source_(std::move(source)), line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

 private:
  std::string source_;
  Index line_;
};

bool to_bool(const std::string& v, const ConfigError& err) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  err.fail("expected a boolean, got '" + v + "'");
}

long long to_int(const std::string& v, const ConfigError& err) {
  long long out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) {
    err.fail("expected an integer, got '" + v + "'");
  }
  return out;
}

double to_double(const std::string& v, const ConfigError& err) {
  double out = 0.0;
  if (!parse_double(v, out)) err.fail("expected a number, got '" + v + "'");
  return out;
}

std::vector<double> to_doubles(const std::string& v, const ConfigError& err) {
  std::vector<double> out;
  for (const auto& piece : split(v, ',')) out.push_back(to_double(piece, err));
  return out;
}

}  // namespace

EvalSpec parse_grid_entry(const std::string& text, const ModelSpec& base) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  if (tokens.size() < 2) throw ValidationError("grid entry needs a name and a model class: '" + text + "'");
  EvalSpec es;
  es.name = tokens[0];
  es.model_class = parse_model_class(tokens[1]);
  es.spec = base;
  es.spec.include_obs = false;
  es.spec.include_ms = false;
  es.spec.delta = 0;
  es.spec.random_walk_tvp = false;
  es.spec.zero_state_variance = false;
  for (std::size_t i = 2; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (tok == "constant") {
      es.spec.zero_state_variance = true;
      continue;
    }
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ValidationError("grid entry token '" + tok + "' is not key=value");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    const auto flag = [&]() {
      if (val == "1" || val == "true") return true;
      if (val == "0" || val == "false") return false;
      throw ValidationError("grid entry " + key + " must be 0 or 1, got '" + val + "'");
    };
    if (key == "obs") es.spec.include_obs = flag();
    else if (key == "ms") es.spec.include_ms = flag();
    else if (key == "delta") {
      if (val == "rw") {
        es.spec.random_walk_tvp = true;
      } else {
        try {
          es.spec.delta = std::stoll(val);
        } catch (const std::exception&) {
          throw ValidationError("grid entry delta '" + val + "' is not an integer or 'rw'");
        }
      }
    } else {
      throw ValidationError("grid entry key '" + key + "' is not recognized");
    }
  }
  return es;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig c;
  std::set<std::string> seen;
  std::vector<std::pair<std::string, ConfigError>> grid_lines;
  std::string line;
  Index line_no = 0;
  auto& s = c.spec;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const ConfigError err(source, line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) err.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (key != "spec" && !seen.insert(key).second) err.fail("key '" + key + "' given twice");

    if (key == "data") c.data = v;
    else if (key == "out") c.out = v;
    else if (key == "draws_dir") c.draws_dir = v;
    else if (key == "difference") c.difference = to_bool(v, err);
    else if (key == "model_class") {
      try {
        c.model_class = parse_model_class(v);
      } catch (const ValidationError& e) {
        err.fail(e.what());
      }
    } else if (key == "lags") s.P = to_int(v, err);
    else if (key == "obs") s.include_obs = to_bool(v, err);
    else if (key == "ms") s.include_ms = to_bool(v, err);
    else if (key == "delta") s.delta = to_int(v, err);
    else if (key == "random_walk") s.random_walk_tvp = to_bool(v, err);
    else if (key == "constant") s.zero_state_variance = to_bool(v, err);
    else if (key == "mcmc_draws") s.mcmc.draws = to_int(v, err);
    else if (key == "mcmc_burn") s.mcmc.burn = to_int(v, err);
    else if (key == "mcmc_thin") s.mcmc.thin = to_int(v, err);
    else if (key == "seed") s.mcmc.seed = static_cast<std::uint64_t>(to_int(v, err));
    else if (key == "cross_equation") s.mcmc.cross_equation_likelihood = to_bool(v, err);
    else if (key == "horseshoe_cap") s.priors.horseshoe_cap = to_double(v, err);
    else if (key == "sv_mu_mean") s.priors.sv.mu_mean = to_double(v, err);
    else if (key == "sv_mu_var") s.priors.sv.mu_var = to_double(v, err);
    else if (key == "sv_phi_a") s.priors.sv.phi_a = to_double(v, err);
    else if (key == "sv_phi_b") s.priors.sv.phi_b = to_double(v, err);
    else if (key == "sv_sigma2_shape") s.priors.sv.sigma2_shape = to_double(v, err);
    else if (key == "sv_sigma2_rate") s.priors.sv.sigma2_rate = to_double(v, err);
    else if (key == "e00") s.priors.transition.e00 = to_double(v, err);
    else if (key == "e01") s.priors.transition.e01 = to_double(v, err);
    else if (key == "e10") s.priors.transition.e10 = to_double(v, err);
    else if (key == "e11") s.priors.transition.e11 = to_double(v, err);
    else if (key == "ns_alpha") c.ns.alpha = to_double(v, err);
    else if (key == "ns_maturities") c.ns.maturities = to_doubles(v, err);
    else if (key == "first_origin") c.first_origin = v;
    else if (key == "last_origin") c.last_origin = v;
    else if (key == "horizons") {
      c.horizons.clear();
      for (const auto& piece : split(v, ',')) {
        const long long h = to_int(piece, err);
        if (h != 1 && h != 3) err.fail("horizons are restricted to 1 and 3");
        c.horizons.push_back(h);
      }
      if (c.horizons.empty()) err.fail("no horizons given");
    } else if (key == "benchmark") c.benchmark = v;
    else if (key == "joint_score") c.joint_score = to_bool(v, err);
    else if (key == "spec") grid_lines.emplace_back(v, err);
    else if (key == "sim_T") c.sim_T = to_int(v, err);
    else if (key == "sim_M") c.sim_M = to_int(v, err);
    else if (key == "threads") c.threads = static_cast<int>(to_int(v, err));
    else err.fail("unknown key '" + key + "'");
  }
  std::set<std::string> names;
  for (const auto& [text, err] : grid_lines) {
    try {
      EvalSpec es = parse_grid_entry(text, c.spec);
      if (!names.insert(es.name).second) err.fail("spec name '" + es.name + "' repeated");
      c.grid.push_back(std::move(es));
    } catch (const ValidationError& e) {
      if (std::string(e.what()).rfind(source, 0) == 0) throw;
      err.fail(e.what());
    }
  }
  return c;
}

RunConfig read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

namespace {

std::vector<std::pair<std::string, MatrixXd*>> fields(EquationDraws& e) {
  return {{"gamma", &e.gamma},
          {"loadings", &e.loadings},
          {"omega", &e.omega},
          {"tau", &e.tau},
          {"regime", &e.regime},
          {"transition", &e.transition},
          {"log_vol", &e.log_vol},
          {"sv", &e.sv},
          {"tvp", &e.tvp},
          {"hs_loadings_local", &e.hs_loadings_local},
          {"hs_loadings_global", &e.hs_loadings_global},
          {"hs_constants_local", &e.hs_constants_local},
          {"hs_constants_global", &e.hs_constants_global},
          {"hs_omega_local", &e.hs_omega_local},
          {"hs_omega_global", &e.hs_omega_global}};
}

void write_array(const fs::path& path, const MatrixXd& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      auto bits = std::bit_cast<std::uint64_t>(m(r, c));
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
  }
}

MatrixXd read_array(const fs::path& path, Index rows, Index cols) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("missing draw array " + path.string());
  MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      std::uint64_t bits = 0;
      if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
        throw ValidationError("draw array " + path.string() + " is truncated");
      }
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      m(r, c) = std::bit_cast<double>(bits);
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ValidationError("draw array " + path.string() + " has trailing bytes");
  }
  return m;
}

json spec_to_json(const ModelSpec& s) {
  const auto& p = s.priors;
  json cap = nullptr;
  if (std::isfinite(p.horseshoe_cap)) cap = p.horseshoe_cap;
  return {{"M", s.M},
          {"P", s.P},
          {"include_obs", s.include_obs},
          {"R_r", s.R_r},
          {"include_ms", s.include_ms},
          {"delta", s.delta},
          {"zero_state_variance", s.zero_state_variance},
          {"random_walk_tvp", s.random_walk_tvp},
          {"priors",
           {{"sv",
             {{"mu_mean", p.sv.mu_mean},
              {"mu_var", p.sv.mu_var},
              {"phi_a", p.sv.phi_a},
              {"phi_b", p.sv.phi_b},
              {"sigma2_shape", p.sv.sigma2_shape},
              {"sigma2_rate", p.sv.sigma2_rate}}},
            {"transition",
             {{"e00", p.transition.e00},
              {"e01", p.transition.e01},
              {"e10", p.transition.e10},
              {"e11", p.transition.e11}}},
            {"horseshoe_cap", cap}}},
          {"mcmc",
           {{"draws", s.mcmc.draws},
            {"burn", s.mcmc.burn},
            {"thin", s.mcmc.thin},
            {"seed", s.mcmc.seed},
            {"cross_equation_likelihood", s.mcmc.cross_equation_likelihood}}}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.M = j.at("M").get<Index>();
  s.P = j.at("P").get<Index>();
  s.include_obs = j.at("include_obs").get<bool>();
  s.R_r = j.at("R_r").get<Index>();
  s.include_ms = j.at("include_ms").get<bool>();
  s.delta = j.at("delta").get<Index>();
  s.zero_state_variance = j.at("zero_state_variance").get<bool>();
  s.random_walk_tvp = j.at("random_walk_tvp").get<bool>();
  const json& p = j.at("priors");
  const json& sv = p.at("sv");
  s.priors.sv = {sv.at("mu_mean").get<double>(), sv.at("mu_var").get<double>(),
                 sv.at("phi_a").get<double>(), sv.at("phi_b").get<double>(),
                 sv.at("sigma2_shape").get<double>(), sv.at("sigma2_rate").get<double>()};
  const json& tp = p.at("transition");
  s.priors.transition = {tp.at("e00").get<double>(), tp.at("e01").get<double>(),
                         tp.at("e10").get<double>(), tp.at("e11").get<double>()};
  const json& cap = p.at("horseshoe_cap");
  s.priors.horseshoe_cap = cap.is_null() ? std::numeric_limits<double>::infinity() : cap.get<double>();
  const json& mc = j.at("mcmc");
  s.mcmc.draws = mc.at("draws").get<Index>();
  s.mcmc.burn = mc.at("burn").get<Index>();
  s.mcmc.thin = mc.at("thin").get<Index>();
  s.mcmc.seed = mc.at("seed").get<std::uint64_t>();
  s.mcmc.cross_equation_likelihood = mc.at("cross_equation_likelihood").get<bool>();
  return s;
}

}  // namespace

void write_draws(const fs::path& dir, const PosteriorDraws& draws) {
  fs::create_directories(dir);
  json arrays = json::array();
  const auto put = [&](const std::string& name, const MatrixXd& m) {
    const std::string file = name + ".bin";
    write_array(dir / file, m);
    arrays.push_back({{"name", name}, {"file", file}, {"rows", m.rows()}, {"cols", m.cols()}});
  };
  auto& mutable_draws = const_cast<PosteriorDraws&>(draws);
  for (std::size_t j = 0; j < draws.eq.size(); ++j) {
    for (const auto& [name, m] : fields(mutable_draws.eq[j])) {
      put("eq" + std::to_string(j + 1) + "_" + name, *m);
    }
  }
  put("y_tail", draws.y_tail);
  put("modifiers", draws.modifiers);
  put("next_modifiers", draws.next_modifiers.transpose());

  const json manifest = {{"format", "emvar-draws"},
                         {"version", kDrawFormatVersion},
                         {"spec", spec_to_json(draws.spec)},
                         {"spec_hash", draws.spec_hash},
                         {"seed", draws.seed},
                         {"T", draws.dims.T},
                         {"count", draws.count},
                         {"variable_names", draws.variable_names},
                         {"dates", draws.dates},
                         {"arrays", arrays}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw ValidationError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

PosteriorDraws read_draws(const fs::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw ValidationError("no manifest.json in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("manifest in " + dir.string() + " is not valid JSON: " + e.what());
  }
  try {
    if (manifest.at("format") != "emvar-draws") throw ValidationError("not a draw directory: " + dir.string());
    const int version = manifest.at("version").get<int>();
    if (version != kDrawFormatVersion) {
      throw ValidationError("draw format version " + std::to_string(version) + " is not supported (expected " +
                            std::to_string(kDrawFormatVersion) + ")");
    }
    PosteriorDraws d;
    d.spec = spec_from_json(manifest.at("spec"));
    d.spec_hash = manifest.at("spec_hash").get<std::uint64_t>();
    if (d.spec_hash != spec_hash(d.spec)) throw ValidationError("manifest spec hash does not match its spec");
    d.seed = manifest.at("seed").get<std::uint64_t>();
    d.dims = derive_dimensions(d.spec);
    d.dims.T = manifest.at("T").get<Index>();
    d.count = manifest.at("count").get<Index>();
    d.variable_names = manifest.at("variable_names").get<std::vector<std::string>>();
    d.dates = manifest.at("dates").get<std::vector<std::string>>();
    std::map<std::string, json> by_name;
    for (const auto& a : manifest.at("arrays")) by_name[a.at("name").get<std::string>()] = a;
    const auto get = [&](const std::string& name) {
      const auto it = by_name.find(name);
      if (it == by_name.end()) throw ValidationError("manifest lacks array " + name);
      return read_array(dir / it->second.at("file").get<std::string>(), it->second.at("rows").get<Index>(),
                        it->second.at("cols").get<Index>());
    };
    d.eq.resize(static_cast<std::size_t>(d.dims.M));
    for (std::size_t j = 0; j < d.eq.size(); ++j) {
      for (auto& [name, m] : fields(d.eq[j])) {
        *m = get("eq" + std::to_string(j + 1) + "_" + name);
        if (m->rows() != d.count) throw ValidationError("array eq" + std::to_string(j + 1) + "_" + name + " has the wrong row count");
      }
    }
    d.y_tail = get("y_tail");
    d.modifiers = get("modifiers");
    d.next_modifiers = get("next_modifiers").transpose();
    return d;
  } catch (const json::exception& e) {
    throw ValidationError("manifest in " + dir.string() + " is malformed: " + e.what());
  }
}

void write_summary(const fs::path& path, const PosteriorDraws& draws) {
  const auto& dg = draws.diagnostics;
  const json j = {{"spec", describe(draws.spec)},
                  {"stored_draws", draws.count},
                  {"wall_seconds", dg.wall_seconds},
                  {"block_seconds",
                   {{"z", dg.seconds.z},
                    {"loadings", dg.seconds.loadings},
                    {"tvp", dg.seconds.tvp},
                    {"omega", dg.seconds.omega},
                    {"sv", dg.seconds.sv},
                    {"shrinkage", dg.seconds.shrinkage}}},
                  {"sv_phi_acceptance", dg.phi_acceptance},
                  {"sv_sigma2_acceptance", dg.sigma2_acceptance}};
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_normalized_modifiers(const fs::path& dir, const PosteriorDraws& draws) {
  fs::create_directories(dir);
  const auto& d = draws.dims;
  const CheckedSpec checked{draws.spec, d};
  for (Index j = 0; j < d.M; ++j) {
    const ModifierLayout l = modifier_layout(checked, j);
    if (l.width == 0) continue;
    const Index v = d.v[j];
    const EquationDraws& e = draws.eq[j];
    MatrixXd z = MatrixXd::Zero(d.T, l.width);
    if (d.R_r > 0) z.leftCols(d.R_r) = draws.modifiers;
    const Index n_tau = l.width - l.tau;
    for (Index s = 0; s < draws.count; ++s) {
      if (l.ms >= 0) z.col(l.ms) += e.regime.row(s).transpose() / static_cast<double>(draws.count);
      if (n_tau > 0) {
        z.rightCols(n_tau) += e.tau.row(s).reshaped(d.T, n_tau) / static_cast<double>(draws.count);
      }
    }
    MatrixXd median(v, l.width);
    for (Index k = 0; k < v * l.width; ++k) {
      std::vector<double> col(e.loadings.col(k).data(), e.loadings.col(k).data() + draws.count);
      median(k % v, k / v) = quantile(std::move(col), 0.5);
    }
    const NormalizedModifiers nm = normalize_modifiers(z, median);

    std::vector<std::string> names;
    for (Index c = 0; c < d.R_r; ++c) names.push_back("r" + std::to_string(c + 1));
    if (l.ms >= 0) names.push_back("S");
    for (Index c = 0; c < n_tau; ++c) names.push_back("tau" + std::to_string(c + 1));

    const std::string tag = "eq" + std::to_string(j + 1);
    std::ofstream zf(dir / ("modifiers_" + tag + ".csv"));
    zf << "t";
    for (const auto& n : names) zf << ',' << n;
    zf << '\n';
    for (Index t = 0; t < d.T; ++t) {
      zf << (draws.dates.empty() ? std::to_string(t + 1) : draws.dates[t]);
      for (Index c = 0; c < l.width; ++c) zf << ',' << format_number(nm.z(t, c));
      zf << '\n';
    }
    std::ofstream lf(dir / ("loadings_" + tag + ".csv"));
    lf << "coefficient";
    for (const auto& n : names) lf << ',' << n;
    lf << ",intercept_shift\n";
    for (Index i = 0; i < v; ++i) {
      lf << (i < d.K ? "x" + std::to_string(i + 1) : "eps" + std::to_string(i - d.K + 1));
      for (Index c = 0; c < l.width; ++c) lf << ',' << format_number(nm.loadings(i, c));
      lf << ',' << format_number(nm.intercept[i]) << '\n';
    }
    lf << "degenerate";
    for (Index c = 0; c < l.width; ++c) lf << ',' << (nm.degenerate[c] ? 1 : 0);
    lf << ",NA\n";
  }
}

void write_score_table(std::ostream& out, const ScoreTable& table, const std::vector<EvalSpec>& grid) {
  const bool joint = !table.joint.empty() && !table.joint[0].empty() && table.joint[0][0].origins > 0;
  out << "spec,class";
  for (Index h : table.horizons) {
    for (const auto& t : table.targets) out << ',' << t << "_h" << h << "_rmse_ratio," << t << "_h" << h << "_lpbf";
    if (joint) out << ",joint_h" << h << "_lpbf";
  }
  out << '\n';
  for (std::size_t s = 0; s < table.specs.size(); ++s) {
    out << table.specs[s] << ',' << to_string(grid[s].model_class);
    for (std::size_t h = 0; h < table.horizons.size(); ++h) {
      for (const auto& cell : table.cells[s][h]) out << ',' << format_number(cell.rmse_ratio) << ',' << format_number(cell.lpbf);
      if (joint) out << ',' << format_number(table.joint[s][h].lpbf);
    }
    out << '\n';
  }
}

void write_forecast_records(std::ostream& out, const std::vector<ForecastRecord>& records,
                            const std::vector<std::string>& target_names,
                            const std::vector<std::string>& dates) {
  out << "spec,class,origin,horizon,target,point,realized,log_score,status\n";
  for (const auto& r : records) {
    const std::string origin = r.origin < static_cast<Index>(dates.size()) ? dates[r.origin] : std::to_string(r.origin);
    for (Index i = 0; i < r.realized.size(); ++i) {
      out << r.spec << ',' << to_string(r.model_class) << ',' << origin << ',' << r.horizon << ','
          << target_names[i] << ',';
      if (r.ok) {
        out << format_number(r.point[i]) << ',' << format_number(r.realized[i]) << ','
            << format_number(r.log_score[i]) << ",ok\n";
      } else {
        out << "NA," << format_number(r.realized[i]) << ",NA,failed\n";
      }
    }
  }
}

void write_longrun_csv(std::ostream& out, const std::vector<LongrunRow>& rows, const PosteriorDraws& draws) {
  out << "t,i,j,median,q16,q84,n_dropped\n";
  const auto name = [&](Index k) {
    return k < static_cast<Index>(draws.variable_names.size()) ? draws.variable_names[k] : "y" + std::to_string(k + 1);
  };
  for (const auto& r : rows) {
    out << (r.t < static_cast<Index>(draws.dates.size()) ? draws.dates[r.t] : std::to_string(r.t + 1)) << ','
        << name(r.i) << ',' << name(r.j) << ',' << format_number(r.median) << ',' << format_number(r.q16) << ','
        << format_number(r.q84) << ',' << r.n_dropped << '\n';
  }
}

}  // namespace emvar
