#include "mixguide/harness.hpp"

#include "mixguide/data.hpp"
#include "mixguide/errors.hpp"
#include "mixguide/guidance_gen.hpp"
#include "mixguide/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <thread>
#include <tuple>
#include <vector>

namespace mixguide {

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) fail(Errc::BadConfig, "config: methods list is empty");
  if (cfg.n_labeled_sweep.empty() || cfg.n_guidance_sweep.empty())
    fail(Errc::BadConfig, "config: sweeps must be nonempty");
  for (int v : cfg.n_labeled_sweep)
    if (v < 3) fail(Errc::BadConfig, "config: n_labeled values must be >= 3");
  for (int v : cfg.n_guidance_sweep)
    if (v < 0) fail(Errc::BadConfig, "config: n_guidance values must be >= 0");
  if (cfg.n_test < 1) fail(Errc::BadConfig, "config: n_test must be >= 1");
  if (cfg.trials < 1) fail(Errc::BadConfig, "config: trials must be >= 1");
  if (cfg.max_threads < 1) fail(Errc::BadConfig, "config: max_threads must be >= 1");
  if (!(cfg.neighbor_rate > 0.0)) fail(Errc::BadConfig, "config: neighbor_rate must be positive");
  if (!(cfg.stabilizer_eps > 0.0))
    fail(Errc::BadConfig, "config: stabilizer_eps must be positive");

  bool needs_kind = false;
  for (Method m : cfg.methods)
    if (m == Method::MixedGuidance || m == Method::HingeRelative) needs_kind = true;
  if (needs_kind && !cfg.guidance_kind)
    fail(Errc::BadConfig, "config: guidance methods need guidance_kind");
  for (Method m : cfg.methods)
    if (m == Method::HingeRelative && cfg.guidance_kind &&
        *cfg.guidance_kind != GuidanceKind::Relative)
      fail(Errc::BadConfig, "config: the hinge baseline runs on relative guidance only");

  if (const auto* syn = std::get_if<SyntheticSource>(&cfg.dataset_source)) {
    if (syn->n < 1 || syn->d < 1 || syn->noise < 0.0)
      fail(Errc::BadConfig, "config: bad synthetic source");
  } else {
    const auto& csv = std::get<CsvSource>(cfg.dataset_source);
    if (csv.path.empty() || csv.target.empty())
      fail(Errc::BadConfig, "config: csv source needs path and target");
  }
  if (cfg.feature_select_k && *cfg.feature_select_k < 1)
    fail(Errc::BadConfig, "config: feature_select_k must be >= 1");
}

namespace {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (j.contains("dataset_source")) {
    const auto& src = j.at("dataset_source");
    const std::string type = src.at("type").get<std::string>();
    if (type == "synthetic") {
      SyntheticSource syn;
      syn.n = get_or(src, "n", syn.n);
      syn.d = get_or(src, "d", syn.d);
      syn.noise = get_or(src, "noise", syn.noise);
      cfg.dataset_source = syn;
    } else if (type == "csv") {
      cfg.dataset_source = CsvSource{src.at("path").get<std::string>(),
                                     src.at("target").get<std::string>()};
    } else {
      fail(Errc::BadConfig, "dataset_source.type must be 'synthetic' or 'csv'");
    }
  }
  if (j.contains("feature_select_k") && !j.at("feature_select_k").is_null())
    cfg.feature_select_k = j.at("feature_select_k").get<int>();
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& name : j.at("methods")) {
      const auto m = method_from_name(name.get<std::string>());
      if (!m) fail(Errc::BadConfig, "unknown method '" + name.get<std::string>() + "'");
      cfg.methods.push_back(*m);
    }
  }
  if (j.contains("guidance_kind") && !j.at("guidance_kind").is_null()) {
    const std::string name = j.at("guidance_kind").get<std::string>();
    const auto k = kind_from_name(name);
    if (!k) fail(Errc::BadConfig, "unknown guidance kind '" + name + "'");
    cfg.guidance_kind = *k;
  }
  cfg.n_labeled_sweep = get_or(j, "n_labeled_sweep", cfg.n_labeled_sweep);
  cfg.n_guidance_sweep = get_or(j, "n_guidance_sweep", cfg.n_guidance_sweep);
  cfg.n_test = get_or(j, "n_test", cfg.n_test);
  cfg.trials = get_or(j, "trials", cfg.trials);
  cfg.seed = get_or(j, "seed", cfg.seed);
  if (j.contains("tune")) {
    const auto& t = j.at("tune");
    cfg.tune.lambda_grid = get_or(t, "lambda_grid", cfg.tune.lambda_grid);
    cfg.tune.s_multipliers = get_or(t, "s_multipliers", cfg.tune.s_multipliers);
    cfg.tune.cv_repeats = get_or(t, "cv_repeats", cfg.tune.cv_repeats);
    cfg.tune.val_fraction = get_or(t, "val_fraction", cfg.tune.val_fraction);
  }
  cfg.out_dir = get_or(j, "out_dir", cfg.out_dir);
  cfg.max_threads = get_or(j, "max_threads", cfg.max_threads);
  cfg.neighbor_rate = get_or(j, "neighbor_rate", cfg.neighbor_rate);
  cfg.stabilizer_eps = get_or(j, "stabilizer_eps", cfg.stabilizer_eps);
  cfg.hinge_margin = get_or(j, "hinge_margin", cfg.hinge_margin);
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("bad JSON config: ") + e.what());
  }
  return experiment_config_from_json(j);
}

namespace {

Dataset build_source(const ExperimentConfig& cfg, std::string& name) {
  Dataset ds;
  if (const auto* syn = std::get_if<SyntheticSource>(&cfg.dataset_source)) {
    ds = gen_synthetic(syn->n, syn->d, syn->noise, derive_seed(cfg.seed, 0));
    name = "synthetic";
  } else {
    const auto& csv = std::get<CsvSource>(cfg.dataset_source);
    ds = load_csv(csv.path, csv.target);
    name = std::filesystem::path(csv.path).stem().string();
  }
  if (cfg.feature_select_k) ds = select_top_correlated(ds, *cfg.feature_select_k);
  return ds;
}

struct TrialTask {
  int i_nl = 0;
  int i_ng = 0;
  int trial = 0;
};

const char* kind_label(const std::optional<GuidanceKind>& k) {
  return k ? kind_name(*k) : "none";
}

// Everything one method needs inside a trial.
struct MethodRun {
  TunableMethod tunable;
  std::vector<Candidate> candidates;
  GuidanceFactory factory;  // null for methods that take no guidance set
};

GuidanceSet finalize_guidance(const ExperimentConfig& cfg, GuidanceSet gs) {
  gs.rate = cfg.neighbor_rate;
  gs.stabilizer_eps = cfg.stabilizer_eps;
  return gs;
}

MethodRun make_method_run(const ExperimentConfig& cfg, Method method, const Split& sp,
                          int n_guidance, std::uint64_t guid_seed, double range) {
  MethodRun run;
  run.tunable.method = method;
  const SolverSettings solver;
  const double margin = cfg.hinge_margin;

  switch (method) {
    case Method::Ridge:
      run.tunable.fit_predict = [](const Dataset& train, const std::optional<GuidanceSet>&,
                                   const Hyperparams& hyper, const Eigen::MatrixXd& Xv) {
        return predict(fit_ridge_closed_form(train, hyper.lambda1), Xv);
      };
      break;
    case Method::MixedGuidance:
      run.tunable.kind = *cfg.guidance_kind;
      run.tunable.fit_predict = [solver, margin](const Dataset& train,
                                                 const std::optional<GuidanceSet>& guidance,
                                                 const Hyperparams& hyper,
                                                 const Eigen::MatrixXd& Xv) {
        FitSpec fs;
        fs.dataset = train;
        fs.guidance = guidance;
        fs.method = Method::MixedGuidance;
        fs.hyper = hyper;
        fs.solver = solver;
        fs.hinge_margin = margin;
        return predict(fit_mixed_guidance(fs), Xv);
      };
      break;
    case Method::HingeRelative:
      run.tunable.kind = GuidanceKind::Relative;
      run.tunable.fit_predict = [solver, margin](const Dataset& train,
                                                 const std::optional<GuidanceSet>& guidance,
                                                 const Hyperparams& hyper,
                                                 const Eigen::MatrixXd& Xv) {
        FitSpec fs;
        fs.dataset = train;
        fs.guidance = guidance;
        fs.method = Method::HingeRelative;
        fs.hyper = hyper;
        fs.solver = solver;
        fs.hinge_margin = margin;
        return predict(fit_hinge_relative(fs), Xv);
      };
      break;
    case Method::LaplacianRidge: {
      Eigen::MatrixXd unlabeled = sp.pool.X;
      run.tunable.fit_predict = [unlabeled = std::move(unlabeled)](
                                    const Dataset& train, const std::optional<GuidanceSet>&,
                                    const Hyperparams& hyper, const Eigen::MatrixXd& Xv) {
        FitSpec fs;
        fs.dataset = train;
        fs.method = Method::LaplacianRidge;
        fs.hyper = hyper;
        fs.unlabeled = unlabeled;
        return predict(fit_laplacian_ridge(fs), Xv);
      };
      break;
    }
    case Method::QuartilePseudoLabel: {
      const auto pseudo =
          gen_quartile_pseudolabels(sp.pool.y, n_guidance, quartile_grid(sp.pool.y), guid_seed);
      Eigen::MatrixXd px(static_cast<Eigen::Index>(pseudo.size()), sp.pool.d());
      Eigen::VectorXd py(static_cast<Eigen::Index>(pseudo.size()));
      for (std::size_t r = 0; r < pseudo.size(); ++r) {
        px.row(static_cast<Eigen::Index>(r)) = sp.pool.X.row(pseudo[r].first);
        py(static_cast<Eigen::Index>(r)) = pseudo[r].second;
      }
      run.tunable.fit_predict = [px = std::move(px), py = std::move(py)](
                                    const Dataset& train, const std::optional<GuidanceSet>&,
                                    const Hyperparams& hyper, const Eigen::MatrixXd& Xv) {
        FitSpec fs;
        fs.dataset = train;
        fs.method = Method::QuartilePseudoLabel;
        fs.hyper = hyper;
        return predict(fit_quartile_pseudolabel(fs, px, py), Xv);
      };
      break;
    }
  }

  if (run.tunable.kind) {
    const GuidanceKind gk = *run.tunable.kind;
    const Eigen::MatrixXd pool_X = sp.pool.X;
    const Eigen::VectorXd pool_y = sp.pool.y;
    const ExperimentConfig* cfgp = &cfg;
    run.factory = [gk, pool_X, pool_y, n_guidance, cfgp](double s, std::uint64_t seed) {
      const std::optional<double> s_opt =
          gk == GuidanceKind::Similar ? std::optional<double>(s) : std::nullopt;
      return finalize_guidance(*cfgp,
                               make_guidance_set(gk, pool_X, pool_y, n_guidance, seed, s_opt));
    };
  }

  run.candidates = make_candidates(method, run.tunable.kind, cfg.tune,
                                   s_grid(range), sigma_grid(static_cast<int>(sp.labeled.d())));
  return run;
}

std::vector<ResultRow> run_trial(const ExperimentConfig& cfg, const Dataset& source,
                                 const std::string& dataset_name, const TrialTask& task) {
  const int n_labeled = cfg.n_labeled_sweep[static_cast<std::size_t>(task.i_nl)];
  const int n_guidance = cfg.n_guidance_sweep[static_cast<std::size_t>(task.i_ng)];
  const long counter =
      (static_cast<long>(task.i_nl) * static_cast<long>(cfg.n_guidance_sweep.size()) +
       task.i_ng) *
          cfg.trials +
      task.trial;
  const std::uint64_t trial_seed = derive_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(counter));
  const std::uint64_t split_seed = derive_seed(trial_seed, 1);
  const std::uint64_t guid_seed = derive_seed(trial_seed, 2);
  const std::uint64_t tune_seed = derive_seed(trial_seed, 3);

  const Split sp = split(source, n_labeled, cfg.n_test, split_seed);
  double range = response_range(sp.labeled.y);
  if (sp.pool.n() > 0) range = std::max(range, response_range(sp.pool.y));

  TuneSpec tune = cfg.tune;
  tune.rng_seed = tune_seed;

  std::vector<ResultRow> rows;
  for (Method method : cfg.methods) {
    const MethodRun run = make_method_run(cfg, method, sp, n_guidance, guid_seed, range);
    const TuneResult tuned =
        random_cv_tune(run.tunable, sp.labeled, run.factory, run.candidates, tune);

    // Final fit on the full labeled set with the selected grid point. The
    // guidance items are drawn once per trial from guid_seed so every
    // method that consumes the same kind sees the same items.
    Eigen::VectorXd pred;
    if (run.tunable.kind) {
      const GuidanceSet gs = run.factory(tuned.s.value_or(0.0), guid_seed);
      pred = run.tunable.fit_predict(sp.labeled, gs, tuned.hyper, sp.test.X);
    } else {
      pred = run.tunable.fit_predict(sp.labeled, std::nullopt, tuned.hyper, sp.test.X);
    }

    ResultRow row;
    row.dataset = dataset_name;
    row.method = method_name(method);
    row.guidance_kind = kind_label(run.tunable.kind);
    row.n_labeled = n_labeled;
    row.n_guidance = n_guidance;
    row.trial = task.trial;
    row.rmse = rmse(sp.test.y, pred);
    row.mae = mae(sp.test.y, pred);
    row.lambda1 = tuned.hyper.lambda1;
    row.lambda2 = tuned.hyper.lambda2;
    row.lambda_lap = tuned.hyper.lambda_lap;
    row.sigma = tuned.hyper.sigma;
    row.s = tuned.s.value_or(0.0);
    rows.push_back(std::move(row));
  }
  return rows;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.method, a.n_labeled, a.n_guidance, a.trial) <
           std::tie(b.method, b.n_labeled, b.n_guidance, b.trial);
  });
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::string dataset_name;
  const Dataset source = build_source(cfg, dataset_name);

  std::vector<TrialTask> tasks;
  for (std::size_t i_nl = 0; i_nl < cfg.n_labeled_sweep.size(); ++i_nl)
    for (std::size_t i_ng = 0; i_ng < cfg.n_guidance_sweep.size(); ++i_ng)
      for (int trial = 0; trial < cfg.trials; ++trial)
        tasks.push_back(TrialTask{static_cast<int>(i_nl), static_cast<int>(i_ng), trial});

  std::vector<std::vector<ResultRow>> per_task(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());

  const auto work = [&](std::size_t t) {
    try {
      per_task[t] = run_trial(cfg, source, dataset_name, tasks[t]);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };

  const int threads = std::min<int>(cfg.max_threads, static_cast<int>(tasks.size()));
  if (threads <= 1) {
    for (std::size_t t = 0; t < tasks.size(); ++t) work(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w)
      workers.emplace_back([&] {
        for (std::size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) work(t);
      });
    for (std::thread& w : workers) w.join();
  }

  for (std::size_t t = 0; t < tasks.size(); ++t)
    if (errors[t]) {
      try {
        std::rethrow_exception(errors[t]);
      } catch (const Error& e) {
        const TrialTask& task = tasks[t];
        fail(e.code(), "trial " + std::to_string(task.trial) + ", n_labeled " +
                           std::to_string(cfg.n_labeled_sweep[static_cast<std::size_t>(task.i_nl)]) +
                           ": " + e.what());
      }
    }

  std::vector<ResultRow> rows;
  for (std::vector<ResultRow>& part : per_task)
    for (ResultRow& row : part) rows.push_back(std::move(row));
  sort_rows(rows);
  return rows;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CellStats {
  std::vector<double> rmse;
  std::vector<double> mae;
};

double mean_of(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return sd / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

void emit_results(const std::vector<ResultRow>& rows, const std::string& out_dir) {
  if (rows.empty()) fail(Errc::Empty, "emit_results: no rows");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(Errc::IoError, "cannot create '" + out_dir + "': " + ec.message());

  std::vector<ResultRow> sorted = rows;
  sort_rows(sorted);

  {
    const std::string path = out_dir + "/results.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::IoError, "cannot open '" + path + "' for writing");
    out << "dataset,method,guidance_kind,n_labeled,n_guidance,trial,rmse,mae,"
           "lambda1,lambda2,lambda_lap,sigma,s\n";
    for (const ResultRow& r : sorted) {
      out << r.dataset << ',' << r.method << ',' << r.guidance_kind << ',' << r.n_labeled << ','
          << r.n_guidance << ',' << r.trial << ',' << fmt(r.rmse) << ',' << fmt(r.mae) << ','
          << fmt(r.lambda1) << ',' << fmt(r.lambda2) << ',' << fmt(r.lambda_lap) << ','
          << fmt(r.sigma) << ',' << fmt(r.s) << '\n';
    }
    if (!out) fail(Errc::IoError, "write failed for '" + path + "'");
  }

  // (method, guidance_kind, n_labeled, n_guidance) -> per-trial metrics,
  // in the canonical order via an ordered map.
  std::map<std::tuple<std::string, std::string, int, int>, CellStats> cells;
  for (const ResultRow& r : sorted) {
    CellStats& c = cells[{r.method, r.guidance_kind, r.n_labeled, r.n_guidance}];
    c.rmse.push_back(r.rmse);
    c.mae.push_back(r.mae);
  }

  {
    nlohmann::ordered_json summary = nlohmann::ordered_json::array();
    for (const auto& [key, c] : cells) {
      nlohmann::ordered_json cell;
      cell["method"] = std::get<0>(key);
      cell["guidance_kind"] = std::get<1>(key);
      cell["n_labeled"] = std::get<2>(key);
      cell["n_guidance"] = std::get<3>(key);
      cell["count"] = c.rmse.size();
      cell["mean_rmse"] = mean_of(c.rmse);
      cell["stderr_rmse"] = stderr_of(c.rmse);
      cell["mean_mae"] = mean_of(c.mae);
      cell["stderr_mae"] = stderr_of(c.mae);
      summary.push_back(std::move(cell));
    }
    const std::string path = out_dir + "/summary.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::IoError, "cannot open '" + path + "' for writing");
    out << summary.dump(2) << '\n';
    if (!out) fail(Errc::IoError, "write failed for '" + path + "'");
  }

  {
    const std::string path = out_dir + "/curves.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Errc::IoError, "cannot open '" + path + "' for writing");
    out << "method,guidance_kind,n_labeled,n_guidance,count,mean_rmse,stderr_rmse,"
           "mean_mae,stderr_mae\n";
    for (const auto& [key, c] : cells) {
      out << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
          << std::get<3>(key) << ',' << c.rmse.size() << ',' << fmt(mean_of(c.rmse)) << ','
          << fmt(stderr_of(c.rmse)) << ',' << fmt(mean_of(c.mae)) << ','
          << fmt(stderr_of(c.mae)) << '\n';
    }
    if (!out) fail(Errc::IoError, "write failed for '" + path + "'");
  }
}

}  // namespace mixguide
