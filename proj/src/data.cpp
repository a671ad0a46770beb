#include "mixguide/data.hpp"

#include "mixguide/errors.hpp"
#include "mixguide/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace mixguide {

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& X) const {
  if (X.cols() != center.size())
    fail(Errc::DimensionMismatch, "standardizer fitted on " + std::to_string(center.size()) +
                                      " columns, applied to " + std::to_string(X.cols()));
  Eigen::MatrixXd out = X;
  out.rowwise() -= center.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

Standardizer fit_standardizer(const Eigen::MatrixXd& X) {
  if (X.rows() < 2 || X.cols() < 1)
    fail(Errc::Empty, "fit_standardizer needs at least 2 rows and 1 column");
  const double n = static_cast<double>(X.rows());
  Standardizer st;
  st.center = X.colwise().mean();
  Eigen::MatrixXd centered = X.rowwise() - st.center.transpose();
  st.scale = (centered.array().square().colwise().sum() / n).sqrt();
  for (Eigen::Index j = 0; j < st.scale.size(); ++j)
    if (st.scale(j) == 0.0) st.scale(j) = 1.0;
  return st;
}

Standardizer identity_standardizer(Eigen::Index d) {
  Standardizer st;
  st.center = Eigen::VectorXd::Zero(d);
  st.scale = Eigen::VectorXd::Ones(d);
  return st;
}

Dataset gen_synthetic(int n, int d, double noise_sd, std::uint64_t seed) {
  if (n < 1 || d < 1) fail(Errc::BadConfig, "gen_synthetic: n and d must be >= 1");
  if (noise_sd < 0.0) fail(Errc::BadConfig, "gen_synthetic: noise_sd must be >= 0");

  Rng rng(seed);
  Eigen::VectorXd w_true(d);
  for (int j = 0; j < d; ++j) w_true(j) = rng.normal();

  Dataset ds;
  ds.X.resize(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) ds.X(i, j) = rng.normal();

  ds.y.resize(n);
  for (int i = 0; i < n; ++i) ds.y(i) = ds.X.row(i).dot(w_true) + noise_sd * rng.normal();

  ds.feature_names.reserve(d);
  for (int j = 0; j < d; ++j) ds.feature_names.push_back("x" + std::to_string(j + 1));
  ds.target_name = "y";
  validate_dataset(ds);
  return ds;
}

namespace {

std::vector<std::string> split_cells(const std::string& line, std::size_t row_for_errors) {
  if (line.find('"') != std::string::npos)
    fail(Errc::ParseError, "quoted cell at row " + std::to_string(row_for_errors) +
                               "; quoting is not supported");
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end)
    fail(Errc::ParseError, "non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                               ", column " + std::to_string(col) + " (1-based, header excluded)");
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open '" + path + "' for reading");

  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.size() < 2) fail(Errc::ParseError, "'" + path + "' needs a header row and data");

  const std::vector<std::string> header = split_cells(lines[0], 0);
  const std::size_t ncols = header.size();

  std::size_t target_col = ncols;
  for (std::size_t j = 0; j < ncols; ++j)
    if (header[j] == target) {
      target_col = j;
      break;
    }
  if (target_col == ncols) {
    std::size_t idx = 0;
    const auto [ptr, ec] = std::from_chars(target.data(), target.data() + target.size(), idx);
    if (ec == std::errc{} && ptr == target.data() + target.size() && idx < ncols)
      target_col = idx;
  }
  if (target_col == ncols)
    fail(Errc::MissingTarget, "target '" + target + "' is neither a header name nor a column index");

  const std::size_t nrows = lines.size() - 1;
  Dataset ds;
  ds.X.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ncols - 1));
  ds.y.resize(static_cast<Eigen::Index>(nrows));
  for (std::size_t r = 0; r < nrows; ++r) {
    const std::vector<std::string> cells = split_cells(lines[r + 1], r + 1);
    if (cells.size() != ncols)
      fail(Errc::ParseError, "row " + std::to_string(r + 1) + " has " +
                                 std::to_string(cells.size()) + " cells, header has " +
                                 std::to_string(ncols));
    Eigen::Index xj = 0;
    for (std::size_t c = 0; c < ncols; ++c) {
      const double v = parse_cell(cells[c], r + 1, c + 1);
      if (c == target_col)
        ds.y(static_cast<Eigen::Index>(r)) = v;
      else
        ds.X(static_cast<Eigen::Index>(r), xj++) = v;
    }
  }

  for (std::size_t j = 0; j < ncols; ++j)
    if (j != target_col) ds.feature_names.push_back(header[j]);
  ds.target_name = header[target_col];
  validate_dataset(ds);
  return ds;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void save_csv(const std::string& path, const Dataset& ds) {
  validate_dataset(ds);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::IoError, "cannot open '" + path + "' for writing");

  for (Eigen::Index j = 0; j < ds.d(); ++j) {
    const std::string name = ds.feature_names.empty() ? "x" + std::to_string(j + 1)
                                                      : ds.feature_names[static_cast<std::size_t>(j)];
    out << name << ',';
  }
  out << (ds.target_name.empty() ? "y" : ds.target_name) << '\n';

  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (Eigen::Index j = 0; j < ds.d(); ++j) out << format_double(ds.X(i, j)) << ',';
    out << format_double(ds.y(i)) << '\n';
  }
  if (!out) fail(Errc::IoError, "write failed for '" + path + "'");
}

Dataset select_top_correlated(const Dataset& ds, int k) {
  validate_dataset(ds);
  if (k < 1 || k > ds.d())
    fail(Errc::BadK, "k = " + std::to_string(k) + " outside [1, " + std::to_string(ds.d()) + "]");

  const Eigen::VectorXd yc = ds.y.array() - ds.y.mean();
  const double y_ss = yc.squaredNorm();

  struct Ranked {
    double key;  // -|r|, with +inf for undefined correlations
    Eigen::Index col;
  };
  std::vector<Ranked> ranked;
  ranked.reserve(static_cast<std::size_t>(ds.d()));
  for (Eigen::Index j = 0; j < ds.d(); ++j) {
    const Eigen::VectorXd xc = ds.X.col(j).array() - ds.X.col(j).mean();
    const double x_ss = xc.squaredNorm();
    double key = std::numeric_limits<double>::infinity();
    if (x_ss > 0.0 && y_ss > 0.0) {
      const double r = xc.dot(yc) / std::sqrt(x_ss * y_ss);
      if (std::isfinite(r)) key = -std::abs(r);
    }
    ranked.push_back({key, j});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.col < b.col;
  });

  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) keep.push_back(ranked[static_cast<std::size_t>(i)].col);
  std::sort(keep.begin(), keep.end());

  Dataset out;
  out.X.resize(ds.n(), k);
  for (int j = 0; j < k; ++j) {
    out.X.col(j) = ds.X.col(keep[static_cast<std::size_t>(j)]);
    if (!ds.feature_names.empty())
      out.feature_names.push_back(ds.feature_names[static_cast<std::size_t>(keep[static_cast<std::size_t>(j)])]);
  }
  out.y = ds.y;
  out.target_name = ds.target_name;
  return out;
}

namespace {

Dataset subset(const Dataset& ds, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.X.resize(static_cast<Eigen::Index>(rows.size()), ds.d());
  out.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Eigen::Index>(i)) = ds.X.row(rows[i]);
    out.y(static_cast<Eigen::Index>(i)) = ds.y(rows[i]);
  }
  out.feature_names = ds.feature_names;
  out.target_name = ds.target_name;
  return out;
}

}  // namespace

Split split(const Dataset& ds, int n_labeled, int n_test, std::uint64_t seed) {
  validate_dataset(ds);
  if (n_test < 1) fail(Errc::InsufficientRows, "split: n_test must be >= 1");
  if (n_labeled < 0) fail(Errc::InsufficientRows, "split: n_labeled must be >= 0");
  if (static_cast<Eigen::Index>(n_labeled) + n_test > ds.n())
    fail(Errc::InsufficientRows, "split: n_labeled + n_test = " +
                                     std::to_string(n_labeled + n_test) + " exceeds n = " +
                                     std::to_string(ds.n()));

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(ds.n()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  const std::size_t draws = static_cast<std::size_t>(n_test + n_labeled);
  for (std::size_t t = 0; t < draws; ++t) {
    const std::size_t pick = t + static_cast<std::size_t>(rng.uniform_index(
                                     static_cast<std::uint64_t>(idx.size() - t)));
    std::swap(idx[t], idx[pick]);
  }

  std::vector<Eigen::Index> test_idx(idx.begin(), idx.begin() + n_test);
  std::vector<Eigen::Index> lab_idx(idx.begin() + n_test, idx.begin() + static_cast<long>(draws));
  std::vector<Eigen::Index> pool_idx(idx.begin() + static_cast<long>(draws), idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(lab_idx.begin(), lab_idx.end());
  std::sort(pool_idx.begin(), pool_idx.end());

  Split s;
  s.test = subset(ds, test_idx);
  s.labeled = subset(ds, lab_idx);
  s.pool = subset(ds, pool_idx);
  return s;
}

}  // namespace mixguide
