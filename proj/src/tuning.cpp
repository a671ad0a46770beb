#include "mixguide/tuning.hpp"

#include "mixguide/errors.hpp"
#include "mixguide/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

namespace mixguide {

std::vector<double> hyper_grid() {
  std::vector<double> grid{0.0};
  for (int k = -8; k <= 8; ++k) grid.push_back(std::pow(10.0, k));
  return grid;
}

std::vector<double> s_grid(double range) {
  if (range < 0.0) fail(Errc::BadConfig, "s_grid: range must be >= 0");
  return {0.05 * range, 0.1 * range, 0.2 * range, 0.3 * range};
}

std::vector<double> sigma_grid(int d) {
  if (d < 1) fail(Errc::BadConfig, "sigma_grid: d must be >= 1");
  const double base = std::sqrt(static_cast<double>(d));
  return {0.5 * base, base, 2.0 * base};
}

std::vector<Candidate> make_candidates(Method method, std::optional<GuidanceKind> kind,
                                       const TuneSpec& spec, const std::vector<double>& s_values,
                                       const std::vector<double>& sigma_values) {
  if (spec.lambda_grid.empty()) fail(Errc::BadConfig, "empty lambda grid");
  std::vector<Candidate> out;

  const auto push = [&out](double l1, double l2, double llap, double sig, double s, bool uses_s) {
    Candidate c;
    c.hyper.lambda1 = l1;
    c.hyper.lambda2 = l2;
    c.hyper.lambda_lap = llap;
    c.hyper.sigma = sig;
    c.s = s;
    c.uses_s = uses_s;
    out.push_back(c);
  };

  switch (method) {
    case Method::Ridge:
    case Method::QuartilePseudoLabel:
      for (double l1 : spec.lambda_grid) push(l1, 0.0, 0.0, 1.0, 0.0, false);
      break;
    case Method::MixedGuidance:
    case Method::HingeRelative: {
      const bool needs_s = kind && *kind == GuidanceKind::Similar;
      if (needs_s && s_values.empty()) fail(Errc::BadConfig, "Similar tuning needs s values");
      for (double l1 : spec.lambda_grid)
        for (double l2 : spec.lambda_grid) {
          if (needs_s)
            for (double s : s_values) push(l1, l2, 0.0, 1.0, s, true);
          else
            push(l1, l2, 0.0, 1.0, 0.0, false);
        }
      break;
    }
    case Method::LaplacianRidge: {
      if (sigma_values.empty()) fail(Errc::BadConfig, "Laplacian tuning needs sigma values");
      for (double l1 : spec.lambda_grid)
        for (double llap : spec.lambda_grid) {
          if (llap == 0.0) {
            push(l1, 0.0, 0.0, 1.0, 0.0, false);
          } else {
            for (double sig : sigma_values) push(l1, 0.0, llap, sig, 0.0, false);
          }
        }
      break;
    }
  }
  return out;
}

namespace {

// Lower mean wins; exact ties prefer the stronger regularizer.
bool prefer(double mean_a, const Candidate& a, double mean_b, const Candidate& b) {
  if (mean_a != mean_b) return mean_a < mean_b;
  if (a.hyper.lambda1 != b.hyper.lambda1) return a.hyper.lambda1 > b.hyper.lambda1;
  if (a.hyper.lambda2 != b.hyper.lambda2) return a.hyper.lambda2 > b.hyper.lambda2;
  if (a.hyper.lambda_lap != b.hyper.lambda_lap) return a.hyper.lambda_lap > b.hyper.lambda_lap;
  if (a.hyper.sigma != b.hyper.sigma) return a.hyper.sigma > b.hyper.sigma;
  return a.s < b.s;
}

struct CvSplit {
  Dataset train;
  Dataset val;
};

CvSplit make_cv_split(const Dataset& labeled, double val_fraction, std::uint64_t seed) {
  const Eigen::Index n = labeled.n();
  Eigen::Index n_val =
      std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::floor(
                                    val_fraction * static_cast<double>(n) + 0.5)));
  n_val = std::min(n_val, n - 2);

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index t = 0; t < n_val; ++t) {
    const auto pick = t + static_cast<Eigen::Index>(
                              rng.uniform_index(static_cast<std::uint64_t>(n - t)));
    std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(pick)]);
  }
  std::vector<Eigen::Index> val_idx(idx.begin(), idx.begin() + n_val);
  std::vector<Eigen::Index> train_idx(idx.begin() + n_val, idx.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  const auto subset = [&labeled](const std::vector<Eigen::Index>& rows) {
    Dataset out;
    out.X.resize(static_cast<Eigen::Index>(rows.size()), labeled.d());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out.X.row(static_cast<Eigen::Index>(r)) = labeled.X.row(rows[r]);
      out.y(static_cast<Eigen::Index>(r)) = labeled.y(rows[r]);
    }
    out.feature_names = labeled.feature_names;
    out.target_name = labeled.target_name;
    return out;
  };
  return CvSplit{subset(train_idx), subset(val_idx)};
}

}  // namespace

TuneResult random_cv_tune(const TunableMethod& tm, const Dataset& labeled,
                          const GuidanceFactory& guidance_factory,
                          const std::vector<Candidate>& candidates, const TuneSpec& spec) {
  validate_dataset(labeled);
  if (candidates.empty()) fail(Errc::BadConfig, "random_cv_tune: no candidates");
  if (spec.cv_repeats < 1) fail(Errc::BadConfig, "random_cv_tune: cv_repeats must be >= 1");
  if (!(spec.val_fraction > 0.0 && spec.val_fraction < 1.0))
    fail(Errc::BadConfig, "random_cv_tune: val_fraction must lie in (0, 1)");
  if (labeled.n() < 3)
    fail(Errc::InsufficientData, "random_cv_tune needs at least 3 labeled rows");
  if (tm.kind && !guidance_factory)
    fail(Errc::BadConfig, "guidance method tuned without a guidance factory");

  const std::size_t nc = candidates.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> scores(nc, std::vector<double>(
                                                  static_cast<std::size_t>(spec.cv_repeats), inf));

  for (int rep = 0; rep < spec.cv_repeats; ++rep) {
    const CvSplit cv =
        make_cv_split(labeled, spec.val_fraction, derive_seed(spec.rng_seed, 1 + rep));

    // One guidance set per distinct s, shared by every lambda at this repeat.
    std::map<double, GuidanceSet> guidance_by_s;
    if (tm.kind) {
      for (const Candidate& c : candidates)
        if (!guidance_by_s.count(c.s))
          guidance_by_s.emplace(c.s,
                                guidance_factory(c.s, derive_seed(spec.rng_seed, 1000 + rep)));
    }

    for (std::size_t ci = 0; ci < nc; ++ci) {
      const Candidate& c = candidates[ci];
      std::optional<GuidanceSet> guidance;
      if (tm.kind) guidance = guidance_by_s.at(c.s);
      double score = inf;
      try {
        const Eigen::VectorXd pred = tm.fit_predict(cv.train, guidance, c.hyper, cv.val.X);
        if (pred.size() == cv.val.y.size() && pred.allFinite()) score = rmse(cv.val.y, pred);
      } catch (const Error&) {
        // Unusable grid point on this split (e.g. singular system); keep +inf.
      }
      scores[ci][static_cast<std::size_t>(rep)] = score;
    }
  }

  TuneResult result;
  result.table.reserve(nc * static_cast<std::size_t>(spec.cv_repeats));
  std::size_t best = 0;
  double best_mean = inf;
  bool have_best = false;
  for (std::size_t ci = 0; ci < nc; ++ci) {
    double sum = 0.0;
    for (int rep = 0; rep < spec.cv_repeats; ++rep) {
      const double v = scores[ci][static_cast<std::size_t>(rep)];
      sum += v;
      result.table.push_back(ScoreRow{candidates[ci].hyper, candidates[ci].s, rep, v});
    }
    const double mean = sum / spec.cv_repeats;
    if (!have_best || prefer(mean, candidates[ci], best_mean, candidates[best])) {
      best = ci;
      best_mean = mean;
      have_best = true;
    }
  }

  result.hyper = candidates[best].hyper;
  if (candidates[best].uses_s) result.s = candidates[best].s;
  result.mean_rmse = best_mean;
  return result;
}

void write_score_table_csv(const std::string& path, const std::vector<ScoreRow>& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot open '" + path + "' for writing");
  out << "lambda1,lambda2,lambda_lap,sigma,s,repeat,rmse\n";
  char buf[40];
  const auto put = [&out, &buf](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (const ScoreRow& row : table) {
    put(row.hyper.lambda1, ',');
    put(row.hyper.lambda2, ',');
    put(row.hyper.lambda_lap, ',');
    put(row.hyper.sigma, ',');
    put(row.s, ',');
    out << row.repeat << ',';
    put(row.rmse_val, '\n');
  }
  if (!out) fail(Errc::IoError, "write failed for '" + path + "'");
}

}  // namespace mixguide
