#pragma once

#include "mixguide/estimators.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mixguide {

// {0} U {10^k : k = -8..8}, ascending. 18 values.
std::vector<double> hyper_grid();

// {.05, .1, .2, .3} scaled by the response range.
std::vector<double> s_grid(double range);

// Kernel bandwidths scaled to the expected pairwise distance of
// standardized d-dimensional points.
std::vector<double> sigma_grid(int d);

struct TuneSpec {
  std::vector<double> lambda_grid = hyper_grid();
  std::vector<double> s_multipliers = {0.05, 0.1, 0.2, 0.3};
  int cv_repeats = 10;
  double val_fraction = 0.2;
  std::uint64_t rng_seed = 0;
};

// One grid point. s is meaningful only when uses_s is set.
struct Candidate {
  Hyperparams hyper;
  double s = 0.0;
  bool uses_s = false;
};

// Cartesian grid for one method: Ridge and the pseudo-label baseline sweep
// lambda1; guidance methods sweep lambda1 x lambda2 (x s for Similar);
// Laplacian sweeps lambda1 x lambda_lap x sigma, with the sigma axis
// collapsed on lambda_lap = 0 grid points.
std::vector<Candidate> make_candidates(Method method, std::optional<GuidanceKind> kind,
                                       const TuneSpec& spec, const std::vector<double>& s_values,
                                       const std::vector<double>& sigma_values);

// Fits on a training subset and predicts the given rows. The closure owns
// whatever extra state the method needs (unlabeled pool, pseudo-labels).
struct TunableMethod {
  Method method = Method::Ridge;
  std::optional<GuidanceKind> kind;
  std::function<Eigen::VectorXd(const Dataset& train, const std::optional<GuidanceSet>& guidance,
                                const Hyperparams& hyper, const Eigen::MatrixXd& X_val)>
      fit_predict;
};

// Builds the guidance set a grid point sees; called once per (repeat, s).
using GuidanceFactory = std::function<GuidanceSet(double s, std::uint64_t seed)>;

struct ScoreRow {
  Hyperparams hyper;
  double s = 0.0;
  int repeat = 0;
  double rmse_val = 0.0;
};

struct TuneResult {
  Hyperparams hyper;
  std::optional<double> s;
  double mean_rmse = 0.0;
  std::vector<ScoreRow> table;  // candidate-major, repeats in order
};

// Repeated random train/validation splits shared across every candidate;
// returns the candidate minimizing mean validation RMSE. Ties prefer the
// stronger regularizer: larger lambda1, then lambda2, lambda_lap, sigma,
// then smaller s. Grid points whose fit throws score +infinity.
TuneResult random_cv_tune(const TunableMethod& tm, const Dataset& labeled,
                          const GuidanceFactory& guidance_factory,
                          const std::vector<Candidate>& candidates, const TuneSpec& spec);

void write_score_table_csv(const std::string& path, const std::vector<ScoreRow>& table);

}  // namespace mixguide
