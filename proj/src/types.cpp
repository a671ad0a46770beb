#include "mixguide/types.hpp"

#include <cmath>
#include <string>

namespace mixguide {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::Empty: return "Empty";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DuplicateIndexWithinItem: return "DuplicateIndexWithinItem";
    case Errc::MissingThreshold: return "MissingThreshold";
    case Errc::BadInterval: return "BadInterval";
    case Errc::BadThreshold: return "BadThreshold";
    case Errc::BadRate: return "BadRate";
    case Errc::BadStabilizer: return "BadStabilizer";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::NonFiniteOracle: return "NonFiniteOracle";
    case Errc::InsufficientDistinctResponses: return "InsufficientDistinctResponses";
    case Errc::RetryBudgetExhausted: return "RetryBudgetExhausted";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::MissingTarget: return "MissingTarget";
    case Errc::BadK: return "BadK";
    case Errc::InsufficientRows: return "InsufficientRows";
    case Errc::InsufficientData: return "InsufficientData";
    case Errc::BadBandwidth: return "BadBandwidth";
    case Errc::BadConfig: return "BadConfig";
  }
  return "UnknownError";
}

void validate_dataset(const Dataset& ds) {
  if (ds.X.rows() < 1 || ds.X.cols() < 1) fail(Errc::Empty, "dataset needs n >= 1 and d >= 1");
  if (ds.X.rows() != ds.y.size())
    fail(Errc::DimensionMismatch, "X has " + std::to_string(ds.X.rows()) + " rows but y has " +
                                      std::to_string(ds.y.size()) + " entries");
  if (!ds.X.allFinite()) fail(Errc::NonFiniteValue, "X contains a non-finite entry");
  if (!ds.y.allFinite()) fail(Errc::NonFiniteValue, "y contains a non-finite entry");
  if (!ds.feature_names.empty() && static_cast<Eigen::Index>(ds.feature_names.size()) != ds.X.cols())
    fail(Errc::DimensionMismatch, "feature_names does not match column count");
}

double response_range(const Eigen::VectorXd& y) {
  if (y.size() == 0) fail(Errc::Empty, "response vector is empty");
  return y.maxCoeff() - y.minCoeff();
}

GuidanceKind item_kind(const GuidanceItem& item) {
  switch (item.index()) {
    case 0: return GuidanceKind::Relative;
    case 1: return GuidanceKind::Bound;
    case 2: return GuidanceKind::Neighbor;
    default: return GuidanceKind::Similar;
  }
}

const char* kind_name(GuidanceKind k) {
  switch (k) {
    case GuidanceKind::Relative: return "relative";
    case GuidanceKind::Bound: return "bound";
    case GuidanceKind::Neighbor: return "neighbor";
    case GuidanceKind::Similar: return "similar";
  }
  return "unknown";
}

std::optional<GuidanceKind> kind_from_name(std::string_view name) {
  if (name == "relative") return GuidanceKind::Relative;
  if (name == "bound") return GuidanceKind::Bound;
  if (name == "neighbor") return GuidanceKind::Neighbor;
  if (name == "similar") return GuidanceKind::Similar;
  return std::nullopt;
}

namespace {

void check_index(Eigen::Index idx, Eigen::Index pool_size, const char* label) {
  if (idx < 0 || idx >= pool_size)
    fail(Errc::IndexOutOfRange,
         std::string(label) + " index " + std::to_string(idx) + " outside pool of size " +
             std::to_string(pool_size));
}

void validate_item(const GuidanceItem& item, Eigen::Index pool_size) {
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, RelativeItem>) {
          check_index(g.hi, pool_size, "relative hi");
          check_index(g.lo, pool_size, "relative lo");
          if (g.hi == g.lo) fail(Errc::DuplicateIndexWithinItem, "relative pair repeats an index");
        } else if constexpr (std::is_same_v<T, BoundItem>) {
          check_index(g.idx, pool_size, "bound");
          if (!std::isfinite(g.a) || !std::isfinite(g.b))
            fail(Errc::NonFiniteValue, "bound interval endpoint is not finite");
          if (!(g.a < g.b)) fail(Errc::BadInterval, "bound interval needs a < b");
        } else if constexpr (std::is_same_v<T, NeighborItem>) {
          check_index(g.i, pool_size, "neighbor i");
          check_index(g.j, pool_size, "neighbor j");
          check_index(g.k, pool_size, "neighbor k");
          if (g.i == g.j || g.i == g.k || g.j == g.k)
            fail(Errc::DuplicateIndexWithinItem, "neighbor triple repeats an index");
        } else {
          check_index(g.i, pool_size, "similar i");
          check_index(g.j, pool_size, "similar j");
          if (g.i == g.j) fail(Errc::DuplicateIndexWithinItem, "similar pair repeats an index");
        }
      },
      item);
}

}  // namespace

void validate_guidance(const GuidanceSet& gs, Eigen::Index pool_size) {
  for (const GuidanceItem& item : gs.items) {
    if (item_kind(item) != gs.kind)
      fail(Errc::KindMismatch, std::string("set of kind ") + kind_name(gs.kind) +
                                   " contains a " + kind_name(item_kind(item)) + " item");
    validate_item(item, pool_size);
  }
  if (gs.kind == GuidanceKind::Similar) {
    if (!gs.s.has_value()) fail(Errc::MissingThreshold, "similar guidance needs a threshold s");
    if (!(*gs.s > 0.0)) fail(Errc::BadThreshold, "similar threshold s must be > 0");
  }
  if (!(gs.rate > 0.0)) fail(Errc::BadRate, "exponential rate must be > 0");
  if (!(gs.stabilizer_eps > 0.0)) fail(Errc::BadStabilizer, "stabilizer must be > 0");
}

void validate_hyperparams(const Hyperparams& h, bool uses_sigma) {
  if (h.lambda1 < 0.0 || h.lambda2 < 0.0 || h.lambda_lap < 0.0)
    fail(Errc::BadConfig, "regularization weights must be non-negative");
  if (uses_sigma && !(h.sigma > 0.0)) fail(Errc::BadBandwidth, "sigma must be > 0");
}

Eigen::VectorXd LinearModel::raw_slope() const {
  return (w.array() / x_scale.array()).matrix();
}

double LinearModel::raw_intercept() const {
  return y_center - (w.array() * x_center.array() / x_scale.array()).sum();
}

}  // namespace mixguide
