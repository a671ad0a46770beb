#include "mixguide/losses.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace mixguide {

double logistic_cdf(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double z = std::exp(t);
  const double p = z / (1.0 + z);
  // exp underflows around t < -745; keep the value strictly positive.
  return p > 0.0 ? p : std::numeric_limits<double>::denorm_min();
}

double logistic_cdf_diff(double lo, double hi) {
  return logistic_cdf(lo) * logistic_cdf(-hi) * std::expm1(hi - lo);
}

double softplus(double t) {
  return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

LossEval relative_loss(double f_hi, double f_lo) {
  const double margin = f_hi - f_lo;
  const double slack = logistic_cdf(-margin);  // 1 - F(margin)
  LossEval out;
  out.value = softplus(-margin);
  out.arity = 2;
  out.grad = {-slack, slack, 0.0};
  return out;
}

LossEval bound_loss(double f, double a, double b, double eps) {
  if (!(a < b)) fail(Errc::BadInterval, "bound loss needs a < b");
  const double u = logistic_cdf(b - f);
  const double v = logistic_cdf(a - f);
  const double mass = logistic_cdf_diff(a - f, b - f) + eps;
  LossEval out;
  out.value = -std::log(mass);
  out.arity = 1;
  // d/df of -log(F(b-f) - F(a-f) + eps)
  out.grad = {(u * (1.0 - u) - v * (1.0 - v)) / mass, 0.0, 0.0};
  return out;
}

LossEval neighbor_loss(double f_i, double f_j, double f_k, NeighborSide side, double rate) {
  if (!(rate > 0.0)) fail(Errc::BadRate, "neighbor_loss: rate must be > 0");
  // Side Below penalizes f_k rising above f_j or f_i; Above is the mirror.
  const double u = side == NeighborSide::Below ? f_k - f_j : f_j - f_k;
  const double v = side == NeighborSide::Below ? f_k - f_i : f_i - f_k;
  const double sign = side == NeighborSide::Below ? 1.0 : -1.0;

  LossEval out;
  out.arity = 3;
  const double top = std::max({u, v, 0.0});
  out.value = rate * top;

  // Average the gradients of all pieces attaining the max.
  int active = 0;
  double gi = 0.0, gj = 0.0, gk = 0.0;
  if (u == top) {
    ++active;
    gj -= 1.0;
    gk += 1.0;
  }
  if (v == top) {
    ++active;
    gi -= 1.0;
    gk += 1.0;
  }
  if (top == 0.0) ++active;  // the constant piece contributes a zero gradient
  const double scale = sign * rate / active;
  out.grad = {gi * scale, gj * scale, gk * scale};
  return out;
}

LossEval similar_loss(double f_i, double f_j, double s, double eps) {
  if (!(s > 0.0)) fail(Errc::BadThreshold, "similar loss needs s > 0");
  const double d = f_i - f_j;
  const double t = std::abs(d);  // the loss is even in d; |d| makes swaps exact
  const double u = logistic_cdf(s - t);
  const double v = logistic_cdf(-s - t);
  const double mass = logistic_cdf_diff(-s - t, s - t) + eps;
  LossEval out;
  out.value = -std::log(mass);
  out.arity = 2;
  const double dd = (u * (1.0 - u) - v * (1.0 - v)) / mass;  // d value / d t, t = |d|
  const double gi = d > 0.0 ? dd : (d < 0.0 ? -dd : 0.0);
  out.grad = {gi, -gi, 0.0};
  return out;
}

LossEval hinge_relative_loss(double f_hi, double f_lo, double margin) {
  if (margin < 0.0) fail(Errc::BadThreshold, "hinge_relative_loss: margin must be >= 0");
  const double slack = margin - (f_hi - f_lo);
  LossEval out;
  out.arity = 2;
  if (slack > 0.0) {
    out.value = slack;
    out.grad = {-1.0, 1.0, 0.0};
  } else {
    out.value = 0.0;
    out.grad = {0.0, 0.0, 0.0};
  }
  return out;
}

LossKind loss_kind_for(GuidanceKind k) {
  switch (k) {
    case GuidanceKind::Relative: return LossKind::Relative;
    case GuidanceKind::Bound: return LossKind::Bound;
    case GuidanceKind::Neighbor: return LossKind::Neighbor;
    case GuidanceKind::Similar: return LossKind::Similar;
  }
  return LossKind::None;
}

void ObjectiveSpec::validate() const {
  if (X.rows() != y.size())
    fail(Errc::DimensionMismatch, "labeled matrix rows do not match response length");
  if (!items.empty()) {
    if (pool.cols() != X.cols())
      fail(Errc::DimensionMismatch, "pool column count does not match labeled matrix");
    for (const GuidanceItem& item : items) {
      GuidanceSet probe;  // reuse the per-item index checks
      probe.kind = item_kind(item);
      probe.items = {item};
      probe.s = s > 0.0 ? std::optional<double>(s) : std::nullopt;
      probe.rate = rate;
      probe.stabilizer_eps = eps;
      validate_guidance(probe, pool.rows());
    }
  }
  if (kind == LossKind::Similar && !(s > 0.0))
    fail(Errc::BadThreshold, "similar objective needs s > 0");
}

namespace {

LossEval eval_item(const GuidanceItem& item, const Eigen::VectorXd& f, const ObjectiveSpec& spec) {
  switch (spec.kind) {
    case LossKind::Relative: {
      const auto& g = std::get<RelativeItem>(item);
      return relative_loss(f[g.hi], f[g.lo]);
    }
    case LossKind::Bound: {
      const auto& g = std::get<BoundItem>(item);
      return bound_loss(f[g.idx], g.a, g.b, spec.eps);
    }
    case LossKind::Neighbor: {
      const auto& g = std::get<NeighborItem>(item);
      return neighbor_loss(f[g.i], f[g.j], f[g.k], g.side, spec.rate);
    }
    case LossKind::Similar: {
      const auto& g = std::get<SimilarItem>(item);
      return similar_loss(f[g.i], f[g.j], spec.s, spec.eps);
    }
    case LossKind::HingeRelative: {
      const auto& g = std::get<RelativeItem>(item);
      return hinge_relative_loss(f[g.hi], f[g.lo], spec.hinge_margin);
    }
    case LossKind::None: break;
  }
  fail(Errc::KindMismatch, "objective has guidance items but no loss kind");
}

void item_indices(const GuidanceItem& item, LossKind kind, std::array<Eigen::Index, 3>& idx,
                  int& arity) {
  if (kind == LossKind::Relative || kind == LossKind::HingeRelative) {
    const auto& g = std::get<RelativeItem>(item);
    idx = {g.hi, g.lo, 0};
    arity = 2;
  } else if (kind == LossKind::Bound) {
    idx = {std::get<BoundItem>(item).idx, 0, 0};
    arity = 1;
  } else if (kind == LossKind::Neighbor) {
    const auto& g = std::get<NeighborItem>(item);
    idx = {g.i, g.j, g.k};
    arity = 3;
  } else {
    const auto& g = std::get<SimilarItem>(item);
    idx = {g.i, g.j, 0};
    arity = 2;
  }
}

}  // namespace

ObjectiveEval objective_eval(const Eigen::VectorXd& w, const ObjectiveSpec& spec) {
  if (w.size() != spec.X.cols())
    fail(Errc::DimensionMismatch, "weight length does not match covariate count");
  spec.validate();

  ObjectiveEval out;
  const Eigen::VectorXd residual = spec.X * w - spec.y;
  out.value = residual.squaredNorm() + spec.hyper.lambda1 * w.squaredNorm();
  out.grad = 2.0 * (spec.X.transpose() * residual) + 2.0 * spec.hyper.lambda1 * w;

  if (spec.items.empty() || spec.hyper.lambda2 == 0.0) return out;

  const Eigen::VectorXd f = spec.pool * w;  // predictions over the guidance pool
  const double l2 = spec.hyper.lambda2;
  std::array<Eigen::Index, 3> idx{};
  int arity = 0;
  for (const GuidanceItem& item : spec.items) {
    const LossEval term = eval_item(item, f, spec);
    out.value += l2 * term.value;
    item_indices(item, spec.kind, idx, arity);
    for (int a = 0; a < arity; ++a) {
      if (term.grad[a] != 0.0) out.grad.noalias() += (l2 * term.grad[a]) * spec.pool.row(idx[a]).transpose();
    }
  }
  return out;
}

}  // namespace mixguide
