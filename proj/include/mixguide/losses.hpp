#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "mixguide/types.hpp"

namespace mixguide {

// CDF of the standard logistic distribution, 1/(1+e^-t). Branches on the sign
// of t so the exponential never overflows; strictly positive for finite t.
double logistic_cdf(double t);

// F(hi) - F(lo) for lo <= hi, evaluated as F(lo) * F(-hi) * expm1(hi - lo).
// The product form keeps full relative precision when both CDF values sit in
// the same tail, where the direct subtraction cancels.
double logistic_cdf_diff(double lo, double hi);

// log(1 + e^t) via max(t,0) + log1p(e^-|t|).
double softplus(double t);

// One guidance term: value in nats plus partials with respect to each
// involved prediction. arity is 1 (Bound), 2 (Relative/Similar/hinge),
// or 3 (Neighbor).
struct LossEval {
  double value = 0.0;
  int arity = 0;
  std::array<double, 3> grad{0.0, 0.0, 0.0};
};

// -log P(f_hi > f_lo) under additive standard logistic noise on the margin.
LossEval relative_loss(double f_hi, double f_lo);

// -log(F(b-f) - F(a-f) + eps): the stabilized negative log mass the noisy
// prediction places on [a, b]. Throws BadInterval unless a < b.
LossEval bound_loss(double f, double a, double b, double eps);

// rate * max(f_k - f_j, f_k - f_i, 0) for side Below, the mirror for Above.
// This is the negative log of the min-of-exponential-survivals score with the
// survival extended to 1 on negative arguments, so the term is a
// piecewise-linear convex penalty. Ties between active pieces return the
// averaged subgradient.
LossEval neighbor_loss(double f_i, double f_j, double f_k, NeighborSide side, double rate);

// -log(F(s-d) - F(-s-d) + eps) with d = f_i - f_j. Even in d and minimized at
// d = 0; evaluated through |d| so swapping the arguments is exactly symmetric.
// Throws BadThreshold unless s > 0.
LossEval similar_loss(double f_i, double f_j, double s, double eps);

// max(0, margin - (f_hi - f_lo)); pairwise hinge baseline. The subgradient at
// the kink is taken from the flat side (zero).
LossEval hinge_relative_loss(double f_hi, double f_lo, double margin = 1.0);

enum class LossKind { None, Relative, Bound, Neighbor, Similar, HingeRelative };

LossKind loss_kind_for(GuidanceKind k);

// Combined objective on standardized data:
//   |X w - y|^2 + lambda1 |w|^2 + lambda2 * sum over items
// Predictions inside guidance terms are w'x over pool rows.
struct ObjectiveSpec {
  Eigen::MatrixXd X;     // labeled instances, standardized
  Eigen::VectorXd y;     // centered responses
  Eigen::MatrixXd pool;  // guidance instances under the same transform as X
  std::vector<GuidanceItem> items;
  LossKind kind = LossKind::None;
  Hyperparams hyper;
  double s = 0.0;          // Similar threshold
  double rate = 1.0;       // Neighbor exponential rate
  double eps = 1e-10;      // stabilizer
  double hinge_margin = 1.0;

  void validate() const;  // dimension consistency across X, pool, items
};

struct ObjectiveEval {
  double value = 0.0;
  Eigen::VectorXd grad;
};

// Value and (sub)gradient of the combined objective at w.
ObjectiveEval objective_eval(const Eigen::VectorXd& w, const ObjectiveSpec& spec);

}  // namespace mixguide
