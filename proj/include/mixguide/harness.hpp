#pragma once

#include "mixguide/estimators.hpp"
#include "mixguide/tuning.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace mixguide {

struct SyntheticSource {
  int n = 500;
  int d = 50;
  double noise = 1.0;
};

struct CsvSource {
  std::string path;
  std::string target;
};

struct ExperimentConfig {
  std::variant<SyntheticSource, CsvSource> dataset_source = SyntheticSource{};
  std::optional<int> feature_select_k;
  std::vector<Method> methods = {Method::Ridge, Method::MixedGuidance};
  std::optional<GuidanceKind> guidance_kind;
  std::vector<int> n_labeled_sweep = {10, 20, 30, 40};
  std::vector<int> n_guidance_sweep = {20, 50};
  int n_test = 100;
  int trials = 30;
  std::uint64_t seed = 1;
  TuneSpec tune;  // tune.rng_seed is ignored; per-trial seeds are derived
  std::string out_dir = "out";
  int max_threads = 1;
  double neighbor_rate = 1.0;
  double stabilizer_eps = 1e-10;
  double hinge_margin = 1.0;
};

void validate_config(const ExperimentConfig& cfg);

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

struct ResultRow {
  std::string dataset;
  std::string method;
  std::string guidance_kind;  // "none" for methods that take no weak guidance
  int n_labeled = 0;
  int n_guidance = 0;
  int trial = 0;
  double rmse = 0.0;
  double mae = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda_lap = 0.0;
  double sigma = 0.0;
  double s = 0.0;
};

// One (n_labeled, n_guidance, trial) cell: fresh split, shared guidance and
// tuning splits across methods, one row per method. Rows come back in
// canonical order (method, n_labeled, n_guidance, trial) regardless of
// max_threads, and the whole run is a pure function of the config.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Writes results.csv, summary.json, curves.csv under out_dir.
void emit_results(const std::vector<ResultRow>& rows, const std::string& out_dir);

}  // namespace mixguide
