#pragma once

#include "mixguide/losses.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mixguide {

struct DiagnosticReport {
  std::string name;
  double worst = 0.0;      // largest error or violation seen
  double tolerance = 0.0;
  int checks = 0;

  bool pass() const { return checks > 0 && worst <= tolerance; }
};

// Central-difference gradient audit of the full objective at random
// differentiable points (points near a subdifferential kink are resampled).
// Tolerance 1e-5.
DiagnosticReport gradient_check_suite(LossKind kind, int points, std::uint64_t seed);

// Random chord tests f(tu + (1-t)v) <= t f(u) + (1-t) f(v), violation
// measured relative to max(1, |chord value|). Tolerance 1e-8.
DiagnosticReport convexity_chord_suite(LossKind kind, int chords, std::uint64_t seed);

// Second central differences of t -> log(F(b+t) - F(a+t)) on t in [-20, 20],
// step 0.1, for random a < b. Log-concavity means none exceeds 1e-6.
DiagnosticReport logconcavity_grid_check(int pairs, std::uint64_t seed);

// The three suites over every guidance objective, acceptance-sized.
std::vector<DiagnosticReport> run_all_diagnostics(std::uint64_t seed);

}  // namespace mixguide
