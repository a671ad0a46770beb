#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixguide/data.hpp"
#include "mixguide/rng.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

using namespace mixguide;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

}  // namespace

TEST_CASE("standardizer centers and scales by population moments") {
  Eigen::MatrixXd X(4, 3);
  X << 0, 5, 1,
       2, 5, 3,
       0, 5, 5,
       2, 5, 7;
  const Standardizer st = fit_standardizer(X);
  CHECK(st.center(0) == doctest::Approx(1.0));
  CHECK(st.scale(0) == doctest::Approx(1.0));  // population sd of {0,2,0,2}
  CHECK(st.center(1) == doctest::Approx(5.0));
  CHECK(st.scale(1) == 1.0);                   // constant column keeps scale 1
  CHECK(st.center(2) == doctest::Approx(4.0));
  CHECK(st.scale(2) == doctest::Approx(std::sqrt(5.0)));

  const Eigen::MatrixXd Z = st.apply(X);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(Z.col(j).mean()) <= 1e-12);
  CHECK(Z.col(1).cwiseAbs().maxCoeff() == 0.0);  // constant column maps to zeros

  Eigen::MatrixXd wrong(2, 2);
  CHECK_THROWS_AS(st.apply(wrong), Error);
  CHECK_THROWS_AS(fit_standardizer(Eigen::MatrixXd::Zero(1, 3)), Error);
}

TEST_CASE("identity standardizer is a no-op") {
  const Standardizer st = identity_standardizer(3);
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(5, 3);
  CHECK(st.apply(X) == X);
}

TEST_CASE("synthetic generator shape, determinism, and linear structure") {
  const Dataset ds = gen_synthetic(500, 50, 1.0, 42);
  CHECK(ds.n() == 500);
  CHECK(ds.d() == 50);
  CHECK(ds.feature_names.size() == 50);
  CHECK(ds.feature_names.front() == "x1");
  CHECK(ds.feature_names.back() == "x50");
  CHECK(ds.target_name == "y");

  const Dataset again = gen_synthetic(500, 50, 1.0, 42);
  CHECK(ds.X == again.X);  // bitwise
  CHECK(ds.y == again.y);

  const Dataset other = gen_synthetic(500, 50, 1.0, 43);
  CHECK(ds.y != other.y);

  // Noise-free draws lie exactly on a hyperplane: least squares fits them.
  const Dataset clean = gen_synthetic(200, 5, 0.0, 7);
  const Eigen::VectorXd w =
      (clean.X.transpose() * clean.X).ldlt().solve(clean.X.transpose() * clean.y);
  CHECK((clean.X * w - clean.y).norm() <= 1e-9 * clean.y.norm());
}

TEST_CASE("csv round-trip is bit-exact") {
  const Dataset ds = gen_synthetic(40, 4, 1.0, 3);
  const auto path = temp_file("mixguide_roundtrip.csv");
  save_csv(path.string(), ds);
  const Dataset back = load_csv(path.string(), "y");
  CHECK(back.X == ds.X);  // bitwise
  CHECK(back.y == ds.y);
  CHECK(back.feature_names == ds.feature_names);
  CHECK(back.target_name == "y");
  std::filesystem::remove(path);
}

TEST_CASE("csv loader accepts names, indices, and windows line endings") {
  const auto path = temp_file("mixguide_plain.csv");
  write_text(path, "a,b,target\r\n1,2,3\r\n4,5,6\r\n");
  const Dataset by_name = load_csv(path.string(), "target");
  CHECK(by_name.n() == 2);
  CHECK(by_name.d() == 2);
  CHECK(by_name.y(1) == 6.0);
  CHECK(by_name.feature_names == std::vector<std::string>{"a", "b"});

  const Dataset by_index = load_csv(path.string(), "1");
  CHECK(by_index.target_name == "b");
  CHECK(by_index.y(0) == 2.0);
  CHECK(by_index.feature_names == std::vector<std::string>{"a", "target"});
  std::filesystem::remove(path);
}

TEST_CASE("csv loader reports precise parse failures") {
  const auto path = temp_file("mixguide_bad.csv");

  SUBCASE("non-numeric cell names its row and column") {
    write_text(path, "a,b\n1,2\nx,4\n");
    try {
      load_csv(path.string(), "b");
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseError);
      CHECK(std::string(e.what()).find("row 2") != std::string::npos);
      CHECK(std::string(e.what()).find("column 1") != std::string::npos);
    }
  }
  SUBCASE("ragged row is rejected") {
    write_text(path, "a,b\n1,2\n3\n");
    CHECK_THROWS_AS(load_csv(path.string(), "b"), Error);
  }
  SUBCASE("quotes are rejected outright") {
    write_text(path, "a,b\n\"1\",2\n");
    CHECK_THROWS_AS(load_csv(path.string(), "b"), Error);
  }
  SUBCASE("unknown target") {
    write_text(path, "a,b\n1,2\n");
    try {
      load_csv(path.string(), "c");
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MissingTarget);
    }
  }
  SUBCASE("missing file") {
    try {
      load_csv("/nonexistent/zzz.csv", "y");
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::IoError);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("feature selection keeps the strongest columns in source order") {
  Rng rng(31);
  const int n = 200;
  Dataset ds;
  ds.X.resize(n, 4);
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double signal = rng.normal();
    ds.X(i, 0) = rng.normal();             // noise
    ds.X(i, 1) = signal + 0.01 * rng.normal();  // strong
    ds.X(i, 2) = 7.0;                      // zero variance
    ds.X(i, 3) = -signal + 0.3 * rng.normal();  // medium
    ds.y(i) = signal;
  }
  ds.feature_names = {"n0", "strong", "flat", "medium"};
  ds.target_name = "y";

  const Dataset top1 = select_top_correlated(ds, 1);
  CHECK(top1.d() == 1);
  CHECK(top1.feature_names == std::vector<std::string>{"strong"});
  CHECK(top1.X.col(0) == ds.X.col(1));

  const Dataset top2 = select_top_correlated(ds, 2);
  CHECK(top2.feature_names == std::vector<std::string>{"strong", "medium"});

  // Zero-variance column is ranked last: it only appears when k forces it.
  const Dataset top3 = select_top_correlated(ds, 3);
  CHECK(top3.feature_names == std::vector<std::string>{"n0", "strong", "medium"});

  const Dataset all = select_top_correlated(ds, 4);
  CHECK(all.X == ds.X);
  CHECK(all.feature_names == ds.feature_names);

  CHECK_THROWS_AS(select_top_correlated(ds, 0), Error);
  CHECK_THROWS_AS(select_top_correlated(ds, 5), Error);
}

TEST_CASE("tied correlations resolve to the lower column index") {
  Dataset ds;
  ds.X.resize(3, 2);
  // Identical columns: identical correlation with y.
  ds.X << 1, 1, 2, 2, 3, 3;
  ds.y.resize(3);
  ds.y << 1, 2, 3;
  ds.feature_names = {"first", "second"};
  const Dataset top = select_top_correlated(ds, 1);
  CHECK(top.feature_names == std::vector<std::string>{"first"});
}

TEST_CASE("split produces disjoint covering parts deterministically") {
  // Unique responses let us use y values as row identities.
  Dataset ds = gen_synthetic(60, 3, 1.0, 11);
  const Split sp = split(ds, 20, 15, 99);
  CHECK(sp.labeled.n() == 20);
  CHECK(sp.test.n() == 15);
  CHECK(sp.pool.n() == 25);

  std::multiset<double> seen;
  for (const auto* part : {&sp.labeled, &sp.pool, &sp.test})
    for (Eigen::Index i = 0; i < part->y.size(); ++i) seen.insert(part->y(i));
  std::multiset<double> orig;
  for (Eigen::Index i = 0; i < ds.y.size(); ++i) orig.insert(ds.y(i));
  CHECK(seen == orig);

  const Split again = split(ds, 20, 15, 99);
  CHECK(again.labeled.X == sp.labeled.X);
  CHECK(again.pool.y == sp.pool.y);

  const Split other = split(ds, 20, 15, 100);
  CHECK(other.labeled.y != sp.labeled.y);

  // Names travel with the parts.
  CHECK(sp.pool.feature_names == ds.feature_names);
  CHECK(sp.test.target_name == ds.target_name);
}

TEST_CASE("split boundary cases") {
  Dataset ds = gen_synthetic(10, 2, 1.0, 1);
  const Split exact = split(ds, 7, 3, 5);  // empty pool is allowed
  CHECK(exact.pool.n() == 0);
  CHECK(exact.labeled.n() == 7);

  CHECK_THROWS_AS(split(ds, 8, 3, 5), Error);   // over-subscribed
  CHECK_THROWS_AS(split(ds, -1, 3, 5), Error);  // negative labeled count
  CHECK_THROWS_AS(split(ds, 7, 0, 5), Error);   // no test rows

  const Split no_labeled = split(ds, 0, 3, 5);  // zero labeled rows is legal here
  CHECK(no_labeled.labeled.n() == 0);
  CHECK(no_labeled.pool.n() == 7);
}
