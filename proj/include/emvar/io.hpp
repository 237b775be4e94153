#pragma once

#include "emvar/forecast.hpp"
#include "emvar/gibbs.hpp"
#include "emvar/longrun.hpp"
#include "emvar/model.hpp"
#include "emvar/nelson_siegel.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace emvar {

// CSV with a leading date column; columns named "mod_<name>" are observed
// modifiers, every other column is endogenous, in header order. Modifier
// values are raw (unlagged).
DataPanel read_panel_csv(const std::filesystem::path& path);
DataPanel parse_panel_csv(std::istream& in, const std::string& source);

// Writes the same layout; numbers are printed with 17 significant digits.
void write_panel_csv(const std::filesystem::path& path, const DataPanel& panel);

// Model-ready panel: optional first differences of y, modifiers shifted so
// row t holds r_{t-1}. Both drop the first row. `levels` keeps the
// untransformed y on the surviving rows.
struct PreparedPanel {
  DataPanel panel;
  MatrixXd levels;
};
PreparedPanel prepare_panel(const DataPanel& raw, bool difference);

// Inverse of the modifier shift, for writing a model panel back as raw CSV.
DataPanel unlag_modifiers(const DataPanel& model_panel);

struct RunConfig {
  std::string data;
  std::string out;
  std::string draws_dir;
  bool difference = false;
  ModelClass model_class = ModelClass::var;
  ModelSpec spec;
  NsConfig ns;
  std::string first_origin;
  std::string last_origin;
  std::vector<Index> horizons{1, 3};
  std::string benchmark;
  bool joint_score = false;
  std::vector<EvalSpec> grid;
  Index sim_T = 200;
  Index sim_M = 2;
  int threads = 1;
};

// `key = value` lines, '#' starts a comment. Unknown keys, malformed values
// and repeated scalar keys are errors naming the source line.
RunConfig parse_config(std::istream& in, const std::string& source);
RunConfig read_config(const std::filesystem::path& path);

// "<name> <VAR|NS-VAR> [obs=0|1] [ms=0|1] [delta=<n>|rw] [constant]"
EvalSpec parse_grid_entry(const std::string& text, const ModelSpec& base);

inline constexpr int kDrawFormatVersion = 1;

// Directory with manifest.json and one little-endian float64 file per array
// (row-major, one row per stored draw).
void write_draws(const std::filesystem::path& dir, const PosteriorDraws& draws);
PosteriorDraws read_draws(const std::filesystem::path& dir);

// Estimation summary (timings, acceptance rates) as JSON.
void write_summary(const std::filesystem::path& path, const PosteriorDraws& draws);

// Per equation: normalized posterior-mean modifiers and rescaled
// posterior-median loadings.
void write_normalized_modifiers(const std::filesystem::path& dir, const PosteriorDraws& draws);

void write_score_table(std::ostream& out, const ScoreTable& table, const std::vector<EvalSpec>& grid);
void write_forecast_records(std::ostream& out, const std::vector<ForecastRecord>& records,
                            const std::vector<std::string>& target_names,
                            const std::vector<std::string>& dates);
void write_longrun_csv(std::ostream& out, const std::vector<LongrunRow>& rows,
                       const PosteriorDraws& draws);

std::string format_number(double value);

}  // namespace emvar
