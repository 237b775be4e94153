#pragma once

#include "emvar/gibbs.hpp"
#include "emvar/random.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace emvar {

enum class ModelClass { var, ns_var };

std::string to_string(ModelClass c);
ModelClass parse_model_class(const std::string& text);

// One simulated path from a stored draw. Row s of `mean` and cov[s] are the
// moments of y_{T+s+1} given everything simulated before it
// (Rao-Blackwellized component).
struct PredictivePath {
  MatrixXd y;                 // h x M simulated observations
  MatrixXd mean;              // h x M
  std::vector<MatrixXd> cov;  // h matrices M x M
};

// Advances the model h steps from the end of the estimation sample: tau by
// its random walk, S by P_j, r held at `next_modifiers`, h_j by its AR(1),
// eta from diag(omega), eps from the triangular system.
PredictivePath simulate_predictive(const PosteriorDraws& draws, Index draw, Index h,
                                   RngStream& rng);

// Predictive sample for one horizon, mapped to targets by target = A y (+
// cumulated levels when `base` is set).
struct PredictiveSample {
  MatrixXd value;            // n x targets, simulated
  MatrixXd mean;             // n x targets, component means
  MatrixXd var;              // n x targets, component variances
  std::vector<MatrixXd> cov; // n component covariances, targets x targets
};

struct TargetMap {
  MatrixXd A;                   // targets x M
  std::optional<VectorXd> base; // last observed target levels; cumulates when set
};

std::vector<PredictiveSample> predictive_sample(const PosteriorDraws& draws,
                                                const std::vector<Index>& horizons,
                                                const TargetMap& map, std::uint64_t seed);

double score_rmse(const VectorXd& forecasts, const VectorXd& realized);

// log of (1/n) sum_d N(y; mean_d, var_d), floored at kLogFloor.
double mixture_log_density(const VectorXd& means, const VectorXd& vars, double y);
double mixture_log_density(const std::vector<VectorXd>& means, const std::vector<MatrixXd>& covs,
                           const VectorXd& y);

inline constexpr double kLogFloor = -745.0;

// Mean over origins of (log p_model - log p_benchmark).
double score_lpbf(const VectorXd& model_log, const VectorXd& benchmark_log);

struct EvalSpec {
  std::string name;
  ModelClass model_class = ModelClass::var;
  ModelSpec spec;
};

// Model-unit data for one model class plus its map to the scoring targets.
struct ClassData {
  DataPanel panel;
  MatrixXd target_map;  // targets x M
};

struct EvaluationInput {
  std::optional<ClassData> var;
  std::optional<ClassData> ns_var;
  // Target values per panel row in scoring units. With `cumulate`, models run
  // on differences and forecasts are cumulated from the origin's level.
  MatrixXd realized;
  bool cumulate = false;
  std::vector<std::string> target_names;
  std::vector<Index> horizons{1, 3};
  Index first_origin = 0;  // panel row of the last estimation observation
  Index last_origin = 0;
  std::string benchmark;
  bool joint_score = false;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct ForecastRecord {
  std::string spec;
  ModelClass model_class = ModelClass::var;
  Index origin = 0;
  Index horizon = 0;
  bool ok = false;
  std::string failure;
  MatrixXd draws;     // n x targets predictive values
  VectorXd point;     // targets, mean of draws
  VectorXd realized;  // targets
  VectorXd log_score; // targets
  double joint_log_score = 0.0;
};

struct ScoreCell {
  double rmse_ratio = 0.0;
  double lpbf = 0.0;
  Index origins = 0;
};

struct ScoreTable {
  std::vector<std::string> specs;
  std::vector<std::string> targets;
  std::vector<Index> horizons;
  // cells[spec][horizon][target]
  std::vector<std::vector<std::vector<ScoreCell>>> cells;
  std::vector<std::vector<ScoreCell>> joint;  // [spec][horizon], when requested
};

struct EvaluationResult {
  std::vector<ForecastRecord> records;
  ScoreTable table;
};

std::uint64_t chain_seed(std::uint64_t seed, const std::string& spec, Index origin);

std::vector<ForecastRecord> run_recursive_forecasts(const std::vector<EvalSpec>& grid,
                                                    const EvaluationInput& input);

ScoreTable score_records(const std::vector<EvalSpec>& grid, const EvaluationInput& input,
                         const std::vector<ForecastRecord>& records);

EvaluationResult recursive_evaluate(const std::vector<EvalSpec>& grid, const EvaluationInput& input);

}  // namespace emvar
