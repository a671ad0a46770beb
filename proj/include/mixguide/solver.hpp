#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace mixguide {

// Objective oracle: returns f(w) and fills grad (resized by the caller's
// contract to w.size()). Must be deterministic for reproducible solves.
using Oracle = std::function<double(const Eigen::VectorXd& w, Eigen::VectorXd& grad)>;

struct SolverSettings {
  int max_iters = 2000;
  double grad_tol = 1e-6;    // infinity norm of the gradient
  double obj_tol = 1e-10;    // relative objective decrease, vs max(1, |f|)
  double ls_shrink = 0.5;    // backtracking factor
  double ls_c1 = 1e-4;       // Armijo sufficient-decrease constant
  int memory = 10;           // L-BFGS history length
};

enum class ConvergedBy { GradNorm, ObjDecrease, MaxIters };

const char* converged_by_name(ConvergedBy c);

struct SolveReport {
  Eigen::VectorXd w_star;
  double final_value = 0.0;
  int iters = 0;
  ConvergedBy converged_by = ConvergedBy::MaxIters;
  double grad_inf_norm = 0.0;
};

// Limited-memory quasi-Newton descent with Armijo backtracking. Falls back to
// the steepest-descent direction whenever the two-loop direction fails to be a
// descent direction. Deterministic: same w0 and oracle give the same report.
SolveReport minimize(const Oracle& oracle, const Eigen::VectorXd& w0,
                     const SolverSettings& settings = {});

struct GradCheckReport {
  double max_rel_err = 0.0;
  int worst_coord = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

// Central-difference check of the oracle's gradient at w. Relative error per
// coordinate uses max(|analytic|, |numeric|, 1e-8) as the denominator.
GradCheckReport check_gradient(const Oracle& oracle, const Eigen::VectorXd& w,
                               double step = 1e-6);

}  // namespace mixguide
