#include "mixguide/diagnostics.hpp"

#include "mixguide/errors.hpp"
#include "mixguide/guidance_gen.hpp"
#include "mixguide/rng.hpp"
#include "mixguide/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixguide {

namespace {

const char* loss_kind_label(LossKind kind) {
  switch (kind) {
    case LossKind::None: return "none";
    case LossKind::Relative: return "relative";
    case LossKind::Bound: return "bound";
    case LossKind::Neighbor: return "neighbor";
    case LossKind::Similar: return "similar";
    case LossKind::HingeRelative: return "hinge_relative";
  }
  return "unknown";
}

GuidanceKind source_kind(LossKind kind) {
  switch (kind) {
    case LossKind::Relative:
    case LossKind::HingeRelative: return GuidanceKind::Relative;
    case LossKind::Bound: return GuidanceKind::Bound;
    case LossKind::Neighbor: return GuidanceKind::Neighbor;
    case LossKind::Similar: return GuidanceKind::Similar;
    case LossKind::None: break;
  }
  fail(Errc::KindMismatch, "no guidance source for this objective");
}

// A moderate-scale random problem: predictions stay a few units wide so no
// guidance term sits in its far tail, where finite differences lose all
// precision against a near-constant stabilized loss.
ObjectiveSpec make_probe_objective(LossKind kind, std::uint64_t seed) {
  constexpr int d = 10;
  constexpr int n_labeled = 30;
  constexpr int n_pool = 60;
  constexpr int n_items = 20;

  Rng rng(seed);
  Eigen::VectorXd w_gen(d);
  for (int j = 0; j < d; ++j) w_gen(j) = 0.3 * rng.normal();

  ObjectiveSpec spec;
  spec.X.resize(n_labeled, d);
  for (int i = 0; i < n_labeled; ++i)
    for (int j = 0; j < d; ++j) spec.X(i, j) = rng.normal();
  spec.y.resize(n_labeled);
  for (int i = 0; i < n_labeled; ++i)
    spec.y(i) = spec.X.row(i).dot(w_gen) + 0.3 * rng.normal();

  spec.pool.resize(n_pool, d);
  for (int i = 0; i < n_pool; ++i)
    for (int j = 0; j < d; ++j) spec.pool(i, j) = rng.normal();
  Eigen::VectorXd y_pool(n_pool);
  for (int i = 0; i < n_pool; ++i)
    y_pool(i) = spec.pool.row(i).dot(w_gen) + 0.3 * rng.normal();

  const std::uint64_t item_seed = rng.raw();
  const GuidanceKind gk = source_kind(kind);
  switch (gk) {
    case GuidanceKind::Relative:
      spec.items = gen_relative(y_pool, n_items, item_seed);
      break;
    case GuidanceKind::Bound:
      spec.items = gen_bound(y_pool, n_items, quartile_grid(y_pool), item_seed);
      break;
    case GuidanceKind::Neighbor:
      spec.items = gen_neighbor(y_pool, n_items, item_seed);
      break;
    case GuidanceKind::Similar:
      spec.items = gen_similar(y_pool, n_items, 0.3 * response_range(y_pool), item_seed);
      spec.s = 0.3 * response_range(y_pool);
      break;
  }
  spec.kind = kind;
  spec.hyper.lambda1 = 0.3;
  spec.hyper.lambda2 = 0.7;
  spec.rate = 1.0;
  spec.eps = 1e-10;
  spec.hinge_margin = 1.0;
  spec.validate();
  return spec;
}

Eigen::VectorXd random_point(Rng& rng, Eigen::Index d, double scale) {
  Eigen::VectorXd w(d);
  for (Eigen::Index j = 0; j < d; ++j) w(j) = scale * rng.normal();
  return w;
}

// Distance from w to the nearest subdifferential kink across all items,
// +inf for everywhere-smooth objectives. For the piecewise-linear terms the
// kinks sit where the active piece of a max changes.
double kink_distance(const ObjectiveSpec& spec, const Eigen::VectorXd& w) {
  if (spec.kind != LossKind::Neighbor && spec.kind != LossKind::HingeRelative)
    return std::numeric_limits<double>::infinity();

  const Eigen::VectorXd f = spec.pool * w;
  double dist = std::numeric_limits<double>::infinity();
  for (const GuidanceItem& item : spec.items) {
    if (spec.kind == LossKind::HingeRelative) {
      const auto& it = std::get<RelativeItem>(item);
      dist = std::min(dist, std::abs(spec.hinge_margin - (f(it.hi) - f(it.lo))));
    } else {
      const auto& it = std::get<NeighborItem>(item);
      double t1, t2;
      if (it.side == NeighborSide::Below) {
        t1 = f(it.k) - f(it.j);
        t2 = f(it.k) - f(it.i);
      } else {
        t1 = f(it.j) - f(it.k);
        t2 = f(it.i) - f(it.k);
      }
      // Gap between the top two of {t1, t2, 0}.
      const double top = std::max({t1, t2, 0.0});
      const double bottom = std::min({t1, t2, 0.0});
      const double mid = t1 + t2 - top - bottom;
      dist = std::min(dist, top - mid);
    }
  }
  return dist;
}

Oracle make_oracle(const ObjectiveSpec& spec) {
  return [&spec](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    ObjectiveEval ev = objective_eval(w, spec);
    grad = std::move(ev.grad);
    return ev.value;
  };
}

}  // namespace

DiagnosticReport gradient_check_suite(LossKind kind, int points, std::uint64_t seed) {
  if (points < 1) fail(Errc::BadConfig, "gradient_check_suite: points must be >= 1");
  const ObjectiveSpec spec = make_probe_objective(kind, derive_seed(seed, 17));
  const Oracle oracle = make_oracle(spec);

  DiagnosticReport report;
  report.name = std::string("gradient/") + loss_kind_label(kind);
  report.tolerance = 1e-5;

  Rng rng(derive_seed(seed, 29));
  constexpr double kink_margin = 1e-3;
  for (int p = 0; p < points; ++p) {
    Eigen::VectorXd w = random_point(rng, spec.X.cols(), 0.3);
    int resamples = 0;
    while (kink_distance(spec, w) <= kink_margin) {
      if (++resamples > 1000)
        fail(Errc::RetryBudgetExhausted, "could not find a differentiable point");
      w = random_point(rng, spec.X.cols(), 0.3);
    }
    const GradCheckReport gc = check_gradient(oracle, w, 1e-6);
    report.worst = std::max(report.worst, gc.max_rel_err);
    ++report.checks;
  }
  return report;
}

DiagnosticReport convexity_chord_suite(LossKind kind, int chords, std::uint64_t seed) {
  if (chords < 1) fail(Errc::BadConfig, "convexity_chord_suite: chords must be >= 1");
  const ObjectiveSpec spec = make_probe_objective(kind, derive_seed(seed, 31));

  DiagnosticReport report;
  report.name = std::string("convexity/") + loss_kind_label(kind);
  report.tolerance = 1e-8;

  Rng rng(derive_seed(seed, 37));
  for (int c = 0; c < chords; ++c) {
    const Eigen::VectorXd u = random_point(rng, spec.X.cols(), 0.5);
    const Eigen::VectorXd v = random_point(rng, spec.X.cols(), 0.5);
    const double t = 0.05 + 0.9 * rng.uniform01();
    const double fu = objective_eval(u, spec).value;
    const double fv = objective_eval(v, spec).value;
    const double chord = t * fu + (1.0 - t) * fv;
    const double fm = objective_eval((t * u + (1.0 - t) * v).eval(), spec).value;
    const double violation = (fm - chord) / std::max(1.0, std::abs(chord));
    report.worst = std::max(report.worst, violation);
    ++report.checks;
  }
  return report;
}

DiagnosticReport logconcavity_grid_check(int pairs, std::uint64_t seed) {
  if (pairs < 1) fail(Errc::BadConfig, "logconcavity_grid_check: pairs must be >= 1");

  DiagnosticReport report;
  report.name = "logconcavity/interval_mass";
  report.tolerance = 1e-6;

  Rng rng(seed);
  constexpr double h = 0.1;
  constexpr int steps = 401;  // t = -20 .. 20
  std::vector<double> g(steps);
  for (int p = 0; p < pairs; ++p) {
    const double a = rng.uniform(-8.0, 8.0);
    const double b = a + rng.uniform(0.1, 8.0);
    for (int i = 0; i < steps; ++i) {
      const double t = -20.0 + h * i;
      g[static_cast<std::size_t>(i)] = std::log(logistic_cdf_diff(a + t, b + t));
    }
    for (int i = 1; i + 1 < steps; ++i) {
      const double second = (g[static_cast<std::size_t>(i - 1)] - 2.0 * g[static_cast<std::size_t>(i)] +
                             g[static_cast<std::size_t>(i + 1)]) /
                            (h * h);
      report.worst = std::max(report.worst, second);
    }
    ++report.checks;
  }
  return report;
}

std::vector<DiagnosticReport> run_all_diagnostics(std::uint64_t seed) {
  const std::vector<LossKind> kinds = {LossKind::Relative, LossKind::Bound, LossKind::Neighbor,
                                       LossKind::Similar, LossKind::HingeRelative};
  std::vector<DiagnosticReport> reports;
  for (LossKind k : kinds) reports.push_back(gradient_check_suite(k, 100, derive_seed(seed, 1)));
  for (LossKind k : kinds) reports.push_back(convexity_chord_suite(k, 1000, derive_seed(seed, 2)));
  reports.push_back(logconcavity_grid_check(100, derive_seed(seed, 3)));
  return reports;
}

}  // namespace mixguide
