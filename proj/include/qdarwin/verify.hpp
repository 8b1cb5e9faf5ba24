#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdarwin/spinstar.hpp"

namespace qdarwin::sweep {

enum class VerifyScope { fast, full };

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::size_t points = 0;
  double seconds = 0.0;
};

struct VerifyReport {
  std::string scope;
  std::vector<CheckResult> checks;

  bool passed() const;
  std::string to_json() const;
};

struct VerifyOptions {
  VerifyScope scope = VerifyScope::fast;
  std::uint64_t seed = 1;
  /// Mutation hook: evaluates the closed-form fragment state with the branch
  /// phase sign flipped. A sound report must then fail.
  bool tamper_closed_form = false;
};

/// Seeded oracle test points: for every N in `env_sizes` and every
/// 1 <= |F| <= min(max_fragment, N), `points_per_cell` draws of
/// theta in [0.1, pi/2 - 0.1], t in [0.1, 3] and Gaussian couplings (0.5, 0.5).
std::vector<ModelPoint> oracle_test_matrix(std::span<const int> env_sizes, int max_fragment,
                                           int points_per_cell, std::uint64_t seed);

VerifyReport verify(const VerifyOptions& options);

}  // namespace qdarwin::sweep
