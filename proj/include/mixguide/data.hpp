#pragma once

#include "mixguide/types.hpp"

#include <cstdint>
#include <string>

namespace mixguide {

// Per-column affine transform fitted on training rows. scale is never zero:
// constant columns get scale 1 and map to all-zeros.
struct Standardizer {
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

Standardizer fit_standardizer(const Eigen::MatrixXd& X);

// Identity transform of the given width, for fits run on raw covariates.
Standardizer identity_standardizer(Eigen::Index d);

struct Split {
  Dataset labeled;
  Dataset pool;
  Dataset test;
};

// y = w_true . x + eps with x ~ N(0, I_d), w_true ~ N(0, I_d),
// eps ~ N(0, noise_sd^2). Column names x1..xd, target "y".
Dataset gen_synthetic(int n = 500, int d = 50, double noise_sd = 1.0,
                      std::uint64_t seed = 0);

// Strict numeric CSV: first row is the header, comma separators, no quoting
// or escapes. `target` is matched against header names first, then parsed as
// a zero-based column index.
Dataset load_csv(const std::string& path, const std::string& target);

// Features in order, target last. Doubles printed with 17 significant
// digits so load_csv(save_csv(ds)) round-trips bit-exactly.
void save_csv(const std::string& path, const Dataset& ds);

// Keeps the k columns most correlated (|Pearson r|) with the response,
// emitted in their original order. Ties go to the lower column index;
// zero-variance columns rank behind every finite correlation.
Dataset select_top_correlated(const Dataset& ds, int k);

// Samples without replacement: test rows first, then labeled, the remainder
// becomes the pool. Row order within each part follows the source.
Split split(const Dataset& ds, int n_labeled, int n_test, std::uint64_t seed);

}  // namespace mixguide
