#pragma once

#include "mixguide/data.hpp"
#include "mixguide/solver.hpp"
#include "mixguide/types.hpp"

#include <optional>
#include <string_view>

namespace mixguide {

enum class Method { Ridge, MixedGuidance, LaplacianRidge, HingeRelative, QuartilePseudoLabel };

const char* method_name(Method m);
std::optional<Method> method_from_name(std::string_view name);

struct FitSpec {
  Dataset dataset;
  std::optional<GuidanceSet> guidance;   // MixedGuidance / HingeRelative only
  Method method = Method::Ridge;
  Hyperparams hyper;
  SolverSettings solver;
  std::optional<Eigen::MatrixXd> unlabeled;  // LaplacianRidge only
  double hinge_margin = 1.0;
  bool standardize = true;
};

// w = (X'X + lambda1 I)^-1 X'y on standardized columns and centered
// responses; the transform is baked into the returned model. Disabling
// standardization fits on the raw data with an identity transform.
LinearModel fit_ridge_closed_form(const Dataset& ds, double lambda1, bool standardize = true);

// Minimizes the penalized likelihood objective: squared error + lambda1
// ridge + lambda2 * sum of guidance losses over pool predictions. The pool
// is transformed with the statistics fitted on the labeled covariates.
LinearModel fit_mixed_guidance(const FitSpec& spec);

// Ridge plus lambda2 * sum of hinge terms over Relative pairs.
LinearModel fit_hinge_relative(const FitSpec& spec);

// Appends the pseudo-labeled rows to the labeled set with unit weight, then
// closed-form ridge on the union. An empty pseudo set is plain ridge.
LinearModel fit_quartile_pseudolabel(const FitSpec& spec, const Eigen::MatrixXd& pseudo_X,
                                     const Eigen::VectorXd& pseudo_y);

// Graph Laplacian of the fully connected Gaussian-kernel graph:
// W_ij = exp(-|xi - xj|^2 / (2 sigma^2)), L = diag(W 1) - W.
Eigen::MatrixXd build_laplacian(const Eigen::MatrixXd& X_all, double sigma);

// Solves (X'X + lambda1 I + lambda_lap A' L A) w = X'y where A stacks the
// labeled rows over spec.unlabeled, all standardized with labeled statistics.
LinearModel fit_laplacian_ridge(const FitSpec& spec);

Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& X);

double rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred);
double mae(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred);

// Value of the full objective (squared error + lambda1 ridge + lambda2
// guidance terms) at the model's weights, all in the model's transformed
// coordinates. Exposed for dominance checks.
double objective_value(const LinearModel& model, const FitSpec& spec);

}  // namespace mixguide
