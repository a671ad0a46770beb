#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mixguide/guidance_gen.hpp"
#include "mixguide/rng.hpp"

#include <algorithm>
#include <cmath>

using namespace mixguide;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("quartile grid follows the linear-interpolation convention") {
  SUBCASE("odd count, evenly spaced") {
    const QuartileGrid g = quartile_grid(vec({1, 2, 3, 4, 5}));
    CHECK(g.values == std::array<double, 5>{1, 2, 3, 4, 5});
  }
  SUBCASE("two points interpolate linearly") {
    const QuartileGrid g = quartile_grid(vec({0, 10}));
    CHECK(g.values == std::array<double, 5>{0, 2.5, 5, 7.5, 10});
  }
  SUBCASE("four points") {
    const QuartileGrid g = quartile_grid(vec({4, 2, 1, 3}));  // order must not matter
    CHECK(g.values[0] == 1.0);
    CHECK(g.values[1] == doctest::Approx(1.75));
    CHECK(g.values[2] == doctest::Approx(2.5));
    CHECK(g.values[3] == doctest::Approx(3.25));
    CHECK(g.values[4] == 4.0);
  }
  SUBCASE("constant sample collapses the grid") {
    const QuartileGrid g = quartile_grid(vec({1, 1, 1, 1}));
    CHECK(g.values == std::array<double, 5>{1, 1, 1, 1, 1});
  }
  SUBCASE("needs at least two values") {
    CHECK_THROWS_AS(quartile_grid(vec({1})), Error);
  }
}

TEST_CASE("relative generation orients every pair by the response") {
  const Eigen::VectorXd y = vec({3, 5});
  const auto items = gen_relative(y, 10, 1);
  REQUIRE(items.size() == 10);
  for (const auto& it : items) {
    const auto& r = std::get<RelativeItem>(it);
    CHECK(r.hi == 1);  // y = 5
    CHECK(r.lo == 0);  // y = 3
  }

  Rng seed_src(2);
  const Eigen::VectorXd big = [&] {
    Eigen::VectorXd v(50);
    for (int i = 0; i < 50; ++i) v(i) = seed_src.normal();
    return v;
  }();
  const auto many = gen_relative(big, 200, 9);
  REQUIRE(many.size() == 200);
  for (const auto& it : many) {
    const auto& r = std::get<RelativeItem>(it);
    CHECK(big(r.hi) > big(r.lo));
  }

  const auto again = gen_relative(big, 200, 9);
  for (std::size_t i = 0; i < many.size(); ++i) {
    CHECK(std::get<RelativeItem>(again[i]).hi == std::get<RelativeItem>(many[i]).hi);
    CHECK(std::get<RelativeItem>(again[i]).lo == std::get<RelativeItem>(many[i]).lo);
  }
}

TEST_CASE("relative generation failure modes") {
  CHECK(gen_relative(vec({1, 2, 3}), 0, 1).empty());
  CHECK_THROWS_AS(gen_relative(vec({1}), 1, 1), Error);
  try {
    gen_relative(vec({2, 2, 2, 2}), 1, 1);  // no pair has distinct responses
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientDistinctResponses);
  }
}

TEST_CASE("bound generation assigns the quartile cell that covers the response") {
  QuartileGrid grid;
  grid.values = {1, 2, 3, 4, 5};

  SUBCASE("interior point lands in its cell") {
    const auto items = gen_bound(vec({3.5}), 5, grid, 1);
    for (const auto& it : items) {
      const auto& b = std::get<BoundItem>(it);
      CHECK(b.a == 3.0);
      CHECK(b.b == 4.0);
    }
  }
  SUBCASE("grid knot goes to the lower cell") {
    const auto items = gen_bound(vec({2.0}), 5, grid, 1);
    for (const auto& it : items) {
      const auto& b = std::get<BoundItem>(it);
      CHECK(b.a == 1.0);
      CHECK(b.b == 2.0);
    }
  }
  SUBCASE("minimum stays in the first cell") {
    const auto items = gen_bound(vec({1.0}), 3, grid, 1);
    for (const auto& it : items) {
      const auto& b = std::get<BoundItem>(it);
      CHECK(b.a == 1.0);
      CHECK(b.b == 2.0);
    }
  }
  SUBCASE("maximum takes the top cell") {
    const auto items = gen_bound(vec({5.0}), 3, grid, 1);
    for (const auto& it : items) {
      const auto& b = std::get<BoundItem>(it);
      CHECK(b.a == 4.0);
      CHECK(b.b == 5.0);
    }
  }
}

TEST_CASE("bound generation widens degenerate cells") {
  // A constant pool collapses every grid value to the same point.
  const Eigen::VectorXd y = vec({4, 4, 4, 4});
  const QuartileGrid grid = quartile_grid(y);
  const auto items = gen_bound(y, 5, grid, 1);
  REQUIRE(items.size() == 5);
  for (const auto& it : items) {
    const auto& b = std::get<BoundItem>(it);
    CHECK(b.a < b.b);
    CHECK(b.a <= 4.0);
    CHECK(b.b >= 4.0);
  }
}

TEST_CASE("bound generation covers the true response on random pools") {
  Rng rng(12);
  Eigen::VectorXd y(80);
  for (int i = 0; i < 80; ++i) y(i) = rng.uniform(-5, 5);
  const QuartileGrid grid = quartile_grid(y);
  const auto items = gen_bound(y, 150, grid, 77);
  REQUIRE(items.size() == 150);
  for (const auto& it : items) {
    const auto& b = std::get<BoundItem>(it);
    CHECK(b.a <= y(b.idx));
    CHECK(y(b.idx) <= b.b);
    CHECK(b.a < b.b);
  }
}

TEST_CASE("neighbor generation ranks by distance and sides by the outlier") {
  SUBCASE("outlier above the pair") {
    // Anchor y=2: distances to 3 and 9 are 1 and 7, so j -> 3, k -> 9,
    // and y_k = 9 exceeds max(2, 3).
    const auto items = gen_neighbor(vec({2, 3, 9}), 8, 4);
    REQUIRE(items.size() == 8);
    for (const auto& it : items) {
      const auto& t = std::get<NeighborItem>(it);
      const Eigen::VectorXd y = vec({2, 3, 9});
      CHECK(std::abs(y(t.i) - y(t.j)) < std::abs(y(t.i) - y(t.k)));
      if (t.i == 0) {
        CHECK(t.j == 1);
        CHECK(t.k == 2);
        CHECK(t.side == NeighborSide::Above);
      }
    }
  }
  SUBCASE("outlier below the pair") {
    const auto items = gen_neighbor(vec({5, 4, 0}), 8, 4);
    for (const auto& it : items) {
      const auto& t = std::get<NeighborItem>(it);
      if (t.i == 0) {
        CHECK(t.j == 1);
        CHECK(t.k == 2);
        CHECK(t.side == NeighborSide::Below);
      }
    }
  }
  SUBCASE("distance ties are rejected, constant pools exhaust the budget") {
    try {
      gen_neighbor(vec({1, 1, 1, 1}), 1, 1);
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::RetryBudgetExhausted);
    }
    // Symmetric pool: anchor 2 sees equidistant 1 and 3; every draw with
    // that anchor is rejected but other anchors still succeed.
    const auto items = gen_neighbor(vec({1, 2, 3}), 6, 3);
    REQUIRE(items.size() == 6);
    for (const auto& it : items) CHECK(std::get<NeighborItem>(it).i != 1);
  }
}

TEST_CASE("neighbor items satisfy their invariants on random pools") {
  Rng rng(8);
  Eigen::VectorXd y(40);
  for (int i = 0; i < 40; ++i) y(i) = rng.normal();
  const auto items = gen_neighbor(y, 120, 19);
  REQUIRE(items.size() == 120);
  for (const auto& it : items) {
    const auto& t = std::get<NeighborItem>(it);
    const double da = std::abs(y(t.i) - y(t.j));
    const double db = std::abs(y(t.i) - y(t.k));
    CHECK(da < db);
    const double lo = std::min(y(t.i), y(t.j));
    const double hi = std::max(y(t.i), y(t.j));
    const bool above = y(t.k) > hi;
    const bool below = y(t.k) < lo;
    CHECK((above || below));
    CHECK(t.side == (above ? NeighborSide::Above : NeighborSide::Below));
  }
}

TEST_CASE("similar generation keeps pairs within the threshold") {
  SUBCASE("only close pairs survive") {
    const auto items = gen_similar(vec({0, 1, 2, 10}), 30, 1.5, 5);
    REQUIRE(items.size() == 30);
    for (const auto& it : items) {
      const auto& p = std::get<SimilarItem>(it);
      const Eigen::VectorXd y = vec({0, 1, 2, 10});
      CHECK(std::abs(y(p.i) - y(p.j)) <= 1.5);
      CHECK(p.i != p.j);
      // Index 3 (y=10) can never pair with anything.
      CHECK(p.i != 3);
      CHECK(p.j != 3);
    }
  }
  SUBCASE("impossible threshold exhausts the budget") {
    try {
      gen_similar(vec({0, 10}), 1, 1.0, 5);
      FAIL("expected a throw");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::RetryBudgetExhausted);
    }
  }
  SUBCASE("threshold must be positive") {
    CHECK_THROWS_AS(gen_similar(vec({0, 1}), 1, 0.0, 5), Error);
  }
}

TEST_CASE("pseudo-labels snap to the nearest grid value, ties downward") {
  QuartileGrid grid;
  grid.values = {1, 2, 3, 4, 5};

  const Eigen::VectorXd y = vec({1.5});  // exactly between 1 and 2
  const auto ps = gen_quartile_pseudolabels(y, 4, grid, 1);
  REQUIRE(ps.size() == 4);
  for (const auto& [idx, v] : ps) {
    CHECK(idx == 0);
    CHECK(v == 1.0);  // tie resolves to the lower value
  }

  const auto near_top = gen_quartile_pseudolabels(vec({4.7}), 2, grid, 1);
  for (const auto& [idx, v] : near_top) CHECK(v == 5.0);

  const auto at_knot = gen_quartile_pseudolabels(vec({3.0}), 2, grid, 1);
  for (const auto& [idx, v] : at_knot) CHECK(v == 3.0);
}

TEST_CASE("pseudo-label draws mirror bound draws under the same seed") {
  Rng rng(44);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) y(i) = rng.uniform(0, 10);
  const QuartileGrid grid = quartile_grid(y);

  const auto bounds = gen_bound(y, 25, grid, 321);
  const auto pseudos = gen_quartile_pseudolabels(y, 25, grid, 321);
  REQUIRE(bounds.size() == pseudos.size());
  for (std::size_t i = 0; i < bounds.size(); ++i)
    CHECK(std::get<BoundItem>(bounds[i]).idx == pseudos[i].first);
}

TEST_CASE("guidance set assembly validates and fills defaults") {
  Rng rng(6);
  Eigen::MatrixXd X(20, 3);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 3; ++j) X(i, j) = rng.normal();
    y(i) = rng.uniform(0, 4);
  }

  SUBCASE("similar picks up the default threshold") {
    const GuidanceSet gs = make_guidance_set(GuidanceKind::Similar, X, y, 10, 3);
    CHECK(gs.kind == GuidanceKind::Similar);
    CHECK(gs.items.size() == 10);
    REQUIRE(gs.s.has_value());
    CHECK(*gs.s == doctest::Approx(0.1 * response_range(y)));
    CHECK(gs.pool == X);
  }
  SUBCASE("explicit threshold wins") {
    const GuidanceSet gs = make_guidance_set(GuidanceKind::Similar, X, y, 10, 3, 2.0);
    CHECK(*gs.s == 2.0);
  }
  SUBCASE("each kind produces items of its own kind") {
    for (GuidanceKind k : {GuidanceKind::Relative, GuidanceKind::Bound, GuidanceKind::Neighbor,
                           GuidanceKind::Similar}) {
      const GuidanceSet gs = make_guidance_set(k, X, y, 6, 9);
      CHECK(gs.kind == k);
      for (const auto& it : gs.items) CHECK(item_kind(it) == k);
    }
  }
  SUBCASE("deterministic in the seed") {
    const GuidanceSet a = make_guidance_set(GuidanceKind::Relative, X, y, 8, 5);
    const GuidanceSet b = make_guidance_set(GuidanceKind::Relative, X, y, 8, 5);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i)
      CHECK(std::get<RelativeItem>(a.items[i]).hi == std::get<RelativeItem>(b.items[i]).hi);
  }
  SUBCASE("pool and response sizes must agree") {
    CHECK_THROWS_AS(make_guidance_set(GuidanceKind::Relative, X, y.head(10), 5, 1), Error);
  }
}
