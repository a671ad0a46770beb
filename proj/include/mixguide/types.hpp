#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mixguide/errors.hpp"

namespace mixguide {

// Labeled instances: the strong guidance. X is n x d, y has length n.
struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> feature_names;  // empty or exactly d entries
  std::string target_name;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index d() const { return X.cols(); }
};

// Throws DimensionMismatch / NonFiniteValue / Empty when an invariant fails.
void validate_dataset(const Dataset& ds);

// max(y) - min(y). Throws Empty on a zero-length vector.
double response_range(const Eigen::VectorXd& y);

enum class GuidanceKind { Relative, Bound, Neighbor, Similar };

// Which side of both f(x_i) and f(x_j) the outlier response f(x_k) lies on.
enum class NeighborSide { Below, Above };

struct RelativeItem {
  Eigen::Index hi = 0;  // f(x_hi) > f(x_lo)
  Eigen::Index lo = 0;
};

struct BoundItem {
  Eigen::Index idx = 0;  // f(x_idx) in [a, b]
  double a = 0.0;
  double b = 0.0;
};

struct NeighborItem {
  Eigen::Index i = 0;  // f(x_i) closer to f(x_j) than to f(x_k)
  Eigen::Index j = 0;
  Eigen::Index k = 0;
  NeighborSide side = NeighborSide::Below;
};

struct SimilarItem {
  Eigen::Index i = 0;  // |f(x_i) - f(x_j)| <= s
  Eigen::Index j = 0;
};

using GuidanceItem = std::variant<RelativeItem, BoundItem, NeighborItem, SimilarItem>;

GuidanceKind item_kind(const GuidanceItem& item);
const char* kind_name(GuidanceKind k);
std::optional<GuidanceKind> kind_from_name(std::string_view name);

// A homogeneous batch of weak guidance over a pool of instances. Item indices
// refer to rows of `pool`, which may alias dataset rows or held-out rows.
struct GuidanceSet {
  GuidanceKind kind = GuidanceKind::Relative;
  std::vector<GuidanceItem> items;
  Eigen::MatrixXd pool;
  std::optional<double> s;      // Similar threshold, response units
  double rate = 1.0;            // exponential rate for Neighbor terms
  double stabilizer_eps = 1e-10;
};

// Checks item indices against pool_size plus the per-kind invariants.
void validate_guidance(const GuidanceSet& gs, Eigen::Index pool_size);

struct Hyperparams {
  double lambda1 = 0.0;     // ridge penalty
  double lambda2 = 0.0;     // guidance weight
  double lambda_lap = 0.0;  // Laplacian weight, baselines only
  double sigma = 1.0;       // Gaussian kernel bandwidth, baselines only
};

void validate_hyperparams(const Hyperparams& h, bool uses_sigma = false);

// Linear predictor together with the column transform fitted on training
// data. Prediction on a raw instance x is w'((x - x_center)/x_scale) + y_center.
struct LinearModel {
  Eigen::VectorXd w;
  Eigen::VectorXd x_center;
  Eigen::VectorXd x_scale;  // all entries strictly positive
  double y_center = 0.0;

  Eigen::Index dim() const { return w.size(); }

  // Coefficients of the equivalent model on raw covariates.
  Eigen::VectorXd raw_slope() const;
  double raw_intercept() const;
};

}  // namespace mixguide
