#pragma once

#include "mixguide/types.hpp"

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace mixguide {

// (min, Q1, median, Q3, max) of a response sample, linear-interpolation
// quantile convention. Non-decreasing by construction.
struct QuartileGrid {
  std::array<double, 5> values{};
};

QuartileGrid quartile_grid(const Eigen::VectorXd& y_pool);

// All generators are pure in (inputs, seed). Rejection samplers stop after
// 100 * m failed attempts and throw.
std::vector<GuidanceItem> gen_relative(const Eigen::VectorXd& y_pool, int m, std::uint64_t seed);
std::vector<GuidanceItem> gen_bound(const Eigen::VectorXd& y_pool, int m, const QuartileGrid& grid,
                                    std::uint64_t seed);
std::vector<GuidanceItem> gen_neighbor(const Eigen::VectorXd& y_pool, int m, std::uint64_t seed);
std::vector<GuidanceItem> gen_similar(const Eigen::VectorXd& y_pool, int m, double s,
                                      std::uint64_t seed);

// Pseudo-label m uniformly drawn pool instances with their nearest grid
// value (ties to the lower value). Index draws match gen_bound's, so the
// same seed pseudo-labels exactly the instances gen_bound would constrain.
std::vector<std::pair<Eigen::Index, double>> gen_quartile_pseudolabels(
    const Eigen::VectorXd& y_pool, int m, const QuartileGrid& grid, std::uint64_t seed);

// Assembles a validated GuidanceSet over the pool. For Similar, a missing s
// defaults to 0.1 * response_range(y_pool). Bound items use the pool's own
// quartile grid.
GuidanceSet make_guidance_set(GuidanceKind kind, const Eigen::MatrixXd& pool_X,
                              const Eigen::VectorXd& y_pool, int m, std::uint64_t seed,
                              std::optional<double> s = std::nullopt);

}  // namespace mixguide
