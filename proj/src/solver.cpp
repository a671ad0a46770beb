#include "mixguide/solver.hpp"

#include "mixguide/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

namespace mixguide {

const char* converged_by_name(ConvergedBy c) {
  switch (c) {
    case ConvergedBy::GradNorm: return "grad_norm";
    case ConvergedBy::ObjDecrease: return "obj_decrease";
    case ConvergedBy::MaxIters: return "max_iters";
  }
  return "unknown";
}

namespace {

struct Pair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

// Two-loop recursion. History is ordered oldest-first.
Eigen::VectorXd lbfgs_direction(const std::deque<Pair>& hist, const Eigen::VectorXd& grad) {
  Eigen::VectorXd q = -grad;
  if (hist.empty()) return q;

  const std::size_t m = hist.size();
  std::vector<double> alpha(m);
  for (std::size_t idx = m; idx-- > 0;) {
    alpha[idx] = hist[idx].rho * hist[idx].s.dot(q);
    q.noalias() -= alpha[idx] * hist[idx].y;
  }
  const Pair& last = hist.back();
  const double gamma = last.s.dot(last.y) / last.y.dot(last.y);
  q *= gamma;
  for (std::size_t idx = 0; idx < m; ++idx) {
    const double beta = hist[idx].rho * hist[idx].y.dot(q);
    q.noalias() += (alpha[idx] - beta) * hist[idx].s;
  }
  return q;
}

}  // namespace

SolveReport minimize(const Oracle& oracle, const Eigen::VectorXd& w0,
                     const SolverSettings& settings) {
  if (w0.size() == 0) fail(Errc::Empty, "minimize: empty start point");
  if (settings.max_iters < 1) fail(Errc::BadConfig, "minimize: max_iters must be >= 1");
  if (!(settings.ls_shrink > 0.0 && settings.ls_shrink < 1.0))
    fail(Errc::BadConfig, "minimize: ls_shrink must lie in (0, 1)");
  if (!(settings.ls_c1 > 0.0 && settings.ls_c1 < 0.5))
    fail(Errc::BadConfig, "minimize: ls_c1 must lie in (0, 0.5)");
  if (settings.memory < 1) fail(Errc::BadConfig, "minimize: memory must be >= 1");

  const Eigen::Index d = w0.size();
  Eigen::VectorXd w = w0;
  Eigen::VectorXd grad(d);
  double f = oracle(w, grad);
  if (!std::isfinite(f) || !grad.allFinite())
    fail(Errc::NonFiniteOracle, "minimize: non-finite objective or gradient at start");

  SolveReport report;
  report.converged_by = ConvergedBy::MaxIters;

  std::deque<Pair> hist;
  Eigen::VectorXd grad_next(d);

  int iter = 0;
  for (; iter < settings.max_iters; ++iter) {
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= settings.grad_tol) {
      report.converged_by = ConvergedBy::GradNorm;
      break;
    }

    Eigen::VectorXd dir = lbfgs_direction(hist, grad);
    double dg = dir.dot(grad);
    // Guard against a non-descent direction from stale curvature pairs.
    if (!(dg < -1e-12 * dir.norm() * grad.norm()) || !dir.allFinite()) {
      dir = -grad;
      dg = -grad.squaredNorm();
    }

    // Backtracking Armijo search.
    double alpha = 1.0;
    double f_try = f;
    Eigen::VectorXd w_try(d);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      w_try = w + alpha * dir;
      f_try = oracle(w_try, grad_next);
      if (std::isfinite(f_try) && grad_next.allFinite() &&
          f_try <= f + settings.ls_c1 * alpha * dg) {
        accepted = true;
        break;
      }
      alpha *= settings.ls_shrink;
    }
    if (!accepted) {
      // The step underflowed before producing sufficient decrease; the
      // objective is flat to working precision along every usable direction.
      report.converged_by = ConvergedBy::ObjDecrease;
      break;
    }

    const double decrease = f - f_try;
    Eigen::VectorXd s = w_try - w;
    Eigen::VectorXd y = grad_next - grad;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      hist.push_back(Pair{std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(hist.size()) > settings.memory) hist.pop_front();
    }

    w.swap(w_try);
    grad.swap(grad_next);
    f = f_try;

    if (decrease <= settings.obj_tol * std::max(1.0, std::abs(f))) {
      ++iter;
      report.converged_by = ConvergedBy::ObjDecrease;
      break;
    }
  }

  report.w_star = std::move(w);
  report.final_value = f;
  report.iters = iter;
  report.grad_inf_norm = grad.lpNorm<Eigen::Infinity>();
  return report;
}

GradCheckReport check_gradient(const Oracle& oracle, const Eigen::VectorXd& w, double step) {
  if (w.size() == 0) fail(Errc::Empty, "check_gradient: empty point");
  if (!(step > 0.0)) fail(Errc::BadConfig, "check_gradient: step must be positive");

  Eigen::VectorXd grad(w.size());
  const double f0 = oracle(w, grad);
  if (!std::isfinite(f0) || !grad.allFinite())
    fail(Errc::NonFiniteOracle, "check_gradient: non-finite oracle output");

  GradCheckReport report;
  Eigen::VectorXd probe = w;
  Eigen::VectorXd scratch(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    probe(i) = w(i) + step;
    const double fp = oracle(probe, scratch);
    probe(i) = w(i) - step;
    const double fm = oracle(probe, scratch);
    probe(i) = w(i);

    const double numeric = (fp - fm) / (2.0 * step);
    const double denom = std::max({std::abs(grad(i)), std::abs(numeric), 1e-8});
    const double rel = std::abs(grad(i) - numeric) / denom;
    if (rel > report.max_rel_err) {
      report.max_rel_err = rel;
      report.worst_coord = static_cast<int>(i);
      report.analytic = grad(i);
      report.numeric = numeric;
    }
  }
  return report;
}

}  // namespace mixguide
