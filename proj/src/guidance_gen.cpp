#include "mixguide/guidance_gen.hpp"

#include "mixguide/errors.hpp"
#include "mixguide/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mixguide {

QuartileGrid quartile_grid(const Eigen::VectorXd& y_pool) {
  if (y_pool.size() < 2) fail(Errc::Empty, "quartile_grid needs at least 2 responses");
  std::vector<double> sorted(y_pool.data(), y_pool.data() + y_pool.size());
  std::sort(sorted.begin(), sorted.end());

  QuartileGrid grid;
  const double n1 = static_cast<double>(sorted.size() - 1);
  const std::array<double, 5> probs{0.0, 0.25, 0.5, 0.75, 1.0};
  for (std::size_t q = 0; q < 5; ++q) {
    const double h = n1 * probs[q];
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    grid.values[q] = sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
  }
  return grid;
}

namespace {

constexpr int kRetryFactor = 100;

// Uniform unordered pair of distinct indices.
std::pair<Eigen::Index, Eigen::Index> draw_pair(Rng& rng, Eigen::Index n) {
  const auto i = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  auto j = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n - 1)));
  if (j >= i) ++j;
  return {i, j};
}

[[noreturn]] void budget_exhausted(Errc code, const char* what, int m) {
  fail(code, std::string(what) + " after " + std::to_string(kRetryFactor) + "x" +
                 std::to_string(m) + " attempts");
}

}  // namespace

std::vector<GuidanceItem> gen_relative(const Eigen::VectorXd& y_pool, int m, std::uint64_t seed) {
  if (y_pool.size() < 2) fail(Errc::Empty, "gen_relative needs a pool of at least 2");
  if (m < 0) fail(Errc::BadConfig, "gen_relative: m must be >= 0");

  std::vector<GuidanceItem> items;
  items.reserve(static_cast<std::size_t>(m));
  Rng rng(seed);
  long attempts = 0;
  const long budget = static_cast<long>(kRetryFactor) * m;
  while (static_cast<int>(items.size()) < m) {
    if (attempts++ >= budget)
      budget_exhausted(Errc::InsufficientDistinctResponses,
                       "gen_relative found too few unequal-response pairs", m);
    auto [i, j] = draw_pair(rng, y_pool.size());
    if (y_pool(i) == y_pool(j)) continue;
    if (y_pool(i) < y_pool(j)) std::swap(i, j);
    items.push_back(RelativeItem{i, j});
  }
  return items;
}

std::vector<GuidanceItem> gen_bound(const Eigen::VectorXd& y_pool, int m, const QuartileGrid& grid,
                                    std::uint64_t seed) {
  if (y_pool.size() < 1) fail(Errc::Empty, "gen_bound needs a nonempty pool");
  if (m < 0) fail(Errc::BadConfig, "gen_bound: m must be >= 0");

  double widen = 1e-6 * response_range(y_pool);
  if (widen == 0.0) widen = 1e-6;  // constant pool: the grid is fully collapsed

  std::vector<GuidanceItem> items;
  items.reserve(static_cast<std::size_t>(m));
  Rng rng(seed);
  for (int t = 0; t < m; ++t) {
    const auto i =
        static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(y_pool.size())));
    const double y = y_pool(i);
    // Largest cell whose lower edge lies strictly below y; ties fall to the
    // lower cell. y at or below the grid minimum lands in cell 0.
    std::size_t cell = 0;
    for (std::size_t g = 1; g < 4; ++g)
      if (grid.values[g] < y) cell = g;
    double a = grid.values[cell];
    double b = grid.values[cell + 1];
    if (a == b) {
      a -= widen;
      b += widen;
    }
    items.push_back(BoundItem{i, a, b});
  }
  return items;
}

std::vector<GuidanceItem> gen_neighbor(const Eigen::VectorXd& y_pool, int m, std::uint64_t seed) {
  if (y_pool.size() < 3) fail(Errc::Empty, "gen_neighbor needs a pool of at least 3");
  if (m < 0) fail(Errc::BadConfig, "gen_neighbor: m must be >= 0");

  std::vector<GuidanceItem> items;
  items.reserve(static_cast<std::size_t>(m));
  Rng rng(seed);
  const Eigen::Index n = y_pool.size();
  long attempts = 0;
  const long budget = static_cast<long>(kRetryFactor) * m;
  while (static_cast<int>(items.size()) < m) {
    if (attempts++ >= budget)
      budget_exhausted(Errc::RetryBudgetExhausted, "gen_neighbor found too few usable triples", m);

    // Three distinct indices; the first draw anchors the triple.
    const auto i = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    auto a = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n - 1)));
    if (a >= i) ++a;
    auto b = static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(n - 2)));
    if (b >= std::min(i, a)) ++b;
    if (b >= std::max(i, a)) ++b;

    const double da = std::abs(y_pool(i) - y_pool(a));
    const double db = std::abs(y_pool(i) - y_pool(b));
    if (da == db) continue;
    const Eigen::Index j = (da < db) ? a : b;
    const Eigen::Index k = (da < db) ? b : a;

    const double lo = std::min(y_pool(i), y_pool(j));
    const double hi = std::max(y_pool(i), y_pool(j));
    if (y_pool(k) >= lo && y_pool(k) <= hi) continue;  // outlier inside the span

    const NeighborSide side = (y_pool(k) > hi) ? NeighborSide::Above : NeighborSide::Below;
    items.push_back(NeighborItem{i, j, k, side});
  }
  return items;
}

std::vector<GuidanceItem> gen_similar(const Eigen::VectorXd& y_pool, int m, double s,
                                      std::uint64_t seed) {
  if (y_pool.size() < 2) fail(Errc::Empty, "gen_similar needs a pool of at least 2");
  if (m < 0) fail(Errc::BadConfig, "gen_similar: m must be >= 0");
  if (!(s > 0.0)) fail(Errc::BadThreshold, "gen_similar: s must be positive");

  std::vector<GuidanceItem> items;
  items.reserve(static_cast<std::size_t>(m));
  Rng rng(seed);
  long attempts = 0;
  const long budget = static_cast<long>(kRetryFactor) * m;
  while (static_cast<int>(items.size()) < m) {
    if (attempts++ >= budget)
      budget_exhausted(Errc::RetryBudgetExhausted, "gen_similar found too few close pairs", m);
    const auto [i, j] = draw_pair(rng, y_pool.size());
    if (std::abs(y_pool(i) - y_pool(j)) > s) continue;
    items.push_back(SimilarItem{i, j});
  }
  return items;
}

std::vector<std::pair<Eigen::Index, double>> gen_quartile_pseudolabels(
    const Eigen::VectorXd& y_pool, int m, const QuartileGrid& grid, std::uint64_t seed) {
  if (y_pool.size() < 1) fail(Errc::Empty, "gen_quartile_pseudolabels needs a nonempty pool");
  if (m < 0) fail(Errc::BadConfig, "gen_quartile_pseudolabels: m must be >= 0");

  std::vector<std::pair<Eigen::Index, double>> out;
  out.reserve(static_cast<std::size_t>(m));
  Rng rng(seed);
  for (int t = 0; t < m; ++t) {
    const auto i =
        static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::uint64_t>(y_pool.size())));
    const double y = y_pool(i);
    double best = grid.values[0];
    double best_dist = std::abs(y - best);
    for (std::size_t g = 1; g < 5; ++g) {
      const double dist = std::abs(y - grid.values[g]);
      if (dist < best_dist) {
        best = grid.values[g];
        best_dist = dist;
      }
    }
    out.emplace_back(i, best);
  }
  return out;
}

GuidanceSet make_guidance_set(GuidanceKind kind, const Eigen::MatrixXd& pool_X,
                              const Eigen::VectorXd& y_pool, int m, std::uint64_t seed,
                              std::optional<double> s) {
  if (pool_X.rows() != y_pool.size())
    fail(Errc::DimensionMismatch, "make_guidance_set: pool rows vs responses");

  GuidanceSet gs;
  gs.kind = kind;
  gs.pool = pool_X;
  switch (kind) {
    case GuidanceKind::Relative:
      gs.items = gen_relative(y_pool, m, seed);
      break;
    case GuidanceKind::Bound:
      gs.items = gen_bound(y_pool, m, quartile_grid(y_pool), seed);
      break;
    case GuidanceKind::Neighbor:
      gs.items = gen_neighbor(y_pool, m, seed);
      break;
    case GuidanceKind::Similar: {
      const double thr = s ? *s : 0.1 * response_range(y_pool);
      gs.s = thr;
      gs.items = gen_similar(y_pool, m, thr, seed);
      break;
    }
  }
  validate_guidance(gs, pool_X.rows());
  return gs;
}

}  // namespace mixguide
