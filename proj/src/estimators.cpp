#include "mixguide/estimators.hpp"

#include "mixguide/errors.hpp"
#include "mixguide/losses.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <string>
#include <utility>

namespace mixguide {

const char* method_name(Method m) {
  switch (m) {
    case Method::Ridge: return "ridge";
    case Method::MixedGuidance: return "mixed_guidance";
    case Method::LaplacianRidge: return "laplacian_ridge";
    case Method::HingeRelative: return "hinge_relative";
    case Method::QuartilePseudoLabel: return "quartile_pseudolabel";
  }
  return "unknown";
}

std::optional<Method> method_from_name(std::string_view name) {
  if (name == "ridge") return Method::Ridge;
  if (name == "mixed_guidance") return Method::MixedGuidance;
  if (name == "laplacian_ridge") return Method::LaplacianRidge;
  if (name == "hinge_relative") return Method::HingeRelative;
  if (name == "quartile_pseudolabel") return Method::QuartilePseudoLabel;
  return std::nullopt;
}

namespace {

struct Prepared {
  Standardizer st;
  Eigen::MatrixXd Xt;
  Eigen::VectorXd yc;
  double y_center = 0.0;
};

Prepared prepare(const Dataset& ds, bool standardize) {
  validate_dataset(ds);
  Prepared p;
  p.st = standardize ? fit_standardizer(ds.X) : identity_standardizer(ds.d());
  p.Xt = p.st.apply(ds.X);
  p.y_center = standardize ? ds.y.mean() : 0.0;
  p.yc = ds.y.array() - p.y_center;
  return p;
}

// Solves A w = b for symmetric positive (semi)definite A, rejecting solves
// whose residual shows the system was numerically inconsistent.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    fail(Errc::SingularSystem, "normal-equations factorization failed");
  Eigen::VectorXd w = ldlt.solve(b);
  const double resid = (A * w - b).norm();
  if (!w.allFinite() || resid > 1e-8 * std::max(1.0, b.norm()))
    fail(Errc::SingularSystem,
         "normal-equations solve left residual " + std::to_string(resid));
  return w;
}

LinearModel package(Eigen::VectorXd w, const Prepared& p) {
  LinearModel model;
  model.w = std::move(w);
  model.x_center = p.st.center;
  model.x_scale = p.st.scale;
  model.y_center = p.y_center;
  return model;
}

LinearModel solve_ridge_on(const Prepared& p, double lambda1) {
  Eigen::MatrixXd A = p.Xt.transpose() * p.Xt;
  A.diagonal().array() += lambda1;
  const Eigen::VectorXd b = p.Xt.transpose() * p.yc;
  return package(spd_solve(A, b), p);
}

ObjectiveSpec make_objective(const Prepared& p, const GuidanceSet& gs, const Hyperparams& hyper,
                             LossKind kind, double hinge_margin) {
  ObjectiveSpec obj;
  obj.X = p.Xt;
  obj.y = p.yc;
  obj.pool = p.st.apply(gs.pool);
  obj.items = gs.items;
  obj.kind = kind;
  obj.hyper = hyper;
  obj.s = gs.s.value_or(0.0);
  obj.rate = gs.rate;
  obj.eps = gs.stabilizer_eps;
  obj.hinge_margin = hinge_margin;
  obj.validate();
  return obj;
}

LinearModel solve_iterative(const Prepared& p, const ObjectiveSpec& obj,
                            const SolverSettings& settings) {
  const Oracle oracle = [&obj](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    ObjectiveEval ev = objective_eval(w, obj);
    grad = std::move(ev.grad);
    return ev.value;
  };
  const SolveReport report = minimize(oracle, Eigen::VectorXd::Zero(p.Xt.cols()), settings);
  return package(report.w_star, p);
}

}  // namespace

LinearModel fit_ridge_closed_form(const Dataset& ds, double lambda1, bool standardize) {
  if (lambda1 < 0.0) fail(Errc::BadConfig, "lambda1 must be >= 0");
  return solve_ridge_on(prepare(ds, standardize), lambda1);
}

LinearModel fit_mixed_guidance(const FitSpec& spec) {
  if (spec.method != Method::MixedGuidance)
    fail(Errc::KindMismatch, "fit_mixed_guidance called with a different method");
  if (!spec.guidance) fail(Errc::Empty, "fit_mixed_guidance needs a guidance set");
  validate_hyperparams(spec.hyper);
  const GuidanceSet& gs = *spec.guidance;
  validate_guidance(gs, gs.pool.rows());

  const Prepared p = prepare(spec.dataset, spec.standardize);
  if (gs.pool.cols() != p.Xt.cols())
    fail(Errc::DimensionMismatch, "guidance pool width differs from covariates");
  const ObjectiveSpec obj =
      make_objective(p, gs, spec.hyper, loss_kind_for(gs.kind), spec.hinge_margin);
  return solve_iterative(p, obj, spec.solver);
}

LinearModel fit_hinge_relative(const FitSpec& spec) {
  if (spec.method != Method::HingeRelative)
    fail(Errc::KindMismatch, "fit_hinge_relative called with a different method");
  if (!spec.guidance) fail(Errc::Empty, "fit_hinge_relative needs a guidance set");
  if (spec.guidance->kind != GuidanceKind::Relative)
    fail(Errc::KindMismatch, "hinge baseline consumes Relative guidance only");
  validate_hyperparams(spec.hyper);
  const GuidanceSet& gs = *spec.guidance;
  validate_guidance(gs, gs.pool.rows());

  const Prepared p = prepare(spec.dataset, spec.standardize);
  if (gs.pool.cols() != p.Xt.cols())
    fail(Errc::DimensionMismatch, "guidance pool width differs from covariates");
  const ObjectiveSpec obj =
      make_objective(p, gs, spec.hyper, LossKind::HingeRelative, spec.hinge_margin);
  return solve_iterative(p, obj, spec.solver);
}

LinearModel fit_quartile_pseudolabel(const FitSpec& spec, const Eigen::MatrixXd& pseudo_X,
                                     const Eigen::VectorXd& pseudo_y) {
  if (spec.method != Method::QuartilePseudoLabel)
    fail(Errc::KindMismatch, "fit_quartile_pseudolabel called with a different method");
  if (pseudo_X.rows() != pseudo_y.size())
    fail(Errc::DimensionMismatch, "pseudo instances vs pseudo labels");
  validate_dataset(spec.dataset);
  if (pseudo_X.rows() > 0 && pseudo_X.cols() != spec.dataset.d())
    fail(Errc::DimensionMismatch, "pseudo instance width differs from covariates");

  if (pseudo_X.rows() == 0)
    return fit_ridge_closed_form(spec.dataset, spec.hyper.lambda1, spec.standardize);

  Dataset merged;
  merged.X.resize(spec.dataset.n() + pseudo_X.rows(), spec.dataset.d());
  merged.X << spec.dataset.X, pseudo_X;
  merged.y.resize(spec.dataset.n() + pseudo_y.size());
  merged.y << spec.dataset.y, pseudo_y;
  merged.feature_names = spec.dataset.feature_names;
  merged.target_name = spec.dataset.target_name;
  return fit_ridge_closed_form(merged, spec.hyper.lambda1, spec.standardize);
}

Eigen::MatrixXd build_laplacian(const Eigen::MatrixXd& X_all, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(Errc::BadBandwidth, "sigma must be positive and finite");
  if (X_all.rows() < 1) fail(Errc::Empty, "build_laplacian needs at least one instance");

  const Eigen::Index n = X_all.rows();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  Eigen::MatrixXd W(n, n);
  W.setZero();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double wij = std::exp(-(X_all.row(i) - X_all.row(j)).squaredNorm() * inv);
      W(i, j) = wij;
      W(j, i) = wij;
    }
  Eigen::MatrixXd L = -W;
  L.diagonal() = W.rowwise().sum();
  return L;
}

LinearModel fit_laplacian_ridge(const FitSpec& spec) {
  if (spec.method != Method::LaplacianRidge)
    fail(Errc::KindMismatch, "fit_laplacian_ridge called with a different method");
  if (!spec.unlabeled) fail(Errc::Empty, "fit_laplacian_ridge needs unlabeled instances");
  validate_hyperparams(spec.hyper, /*uses_sigma=*/true);
  if (spec.unlabeled->cols() != spec.dataset.d())
    fail(Errc::DimensionMismatch, "unlabeled width differs from covariates");

  const Prepared p = prepare(spec.dataset, spec.standardize);
  Eigen::MatrixXd A = p.Xt.transpose() * p.Xt;
  A.diagonal().array() += spec.hyper.lambda1;
  if (spec.hyper.lambda_lap > 0.0) {
    Eigen::MatrixXd all(p.Xt.rows() + spec.unlabeled->rows(), p.Xt.cols());
    all << p.Xt, p.st.apply(*spec.unlabeled);
    const Eigen::MatrixXd L = build_laplacian(all, spec.hyper.sigma);
    A.noalias() += spec.hyper.lambda_lap * (all.transpose() * L * all);
  }
  const Eigen::VectorXd b = p.Xt.transpose() * p.yc;
  return package(spd_solve(A, b), p);
}

Eigen::VectorXd predict(const LinearModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.dim())
    fail(Errc::DimensionMismatch, "predict: model dimension " + std::to_string(model.dim()) +
                                      ", input has " + std::to_string(X.cols()) + " columns");
  Eigen::MatrixXd Xt = X;
  Xt.rowwise() -= model.x_center.transpose();
  Xt.array().rowwise() /= model.x_scale.transpose().array();
  return (Xt * model.w).array() + model.y_center;
}

namespace {

double check_metric_inputs(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  if (truth.size() != pred.size()) fail(Errc::DimensionMismatch, "metric input lengths differ");
  if (truth.size() == 0) fail(Errc::Empty, "metric inputs are empty");
  return static_cast<double>(truth.size());
}

}  // namespace

double rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  const double n = check_metric_inputs(truth, pred);
  return std::sqrt((truth - pred).squaredNorm() / n);
}

double mae(const Eigen::VectorXd& truth, const Eigen::VectorXd& pred) {
  const double n = check_metric_inputs(truth, pred);
  return (truth - pred).cwiseAbs().sum() / n;
}

double objective_value(const LinearModel& model, const FitSpec& spec) {
  const Prepared p = prepare(spec.dataset, spec.standardize);
  ObjectiveSpec obj;
  if (spec.guidance) {
    const LossKind kind = spec.method == Method::HingeRelative
                              ? LossKind::HingeRelative
                              : loss_kind_for(spec.guidance->kind);
    obj = make_objective(p, *spec.guidance, spec.hyper, kind, spec.hinge_margin);
  } else {
    obj.X = p.Xt;
    obj.y = p.yc;
    obj.pool.resize(0, p.Xt.cols());
    obj.kind = LossKind::None;
    obj.hyper = spec.hyper;
  }
  return objective_eval(model.w, obj).value;
}

}  // namespace mixguide
