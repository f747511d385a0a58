#pragma once

// The acceptance suite: twelve pass/fail checks covering the closed-form
// smoothing factors, the convergence tables, and the operator oracles.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "macmg/multigrid.hpp"

namespace macmg::acceptance {

struct Options {
  /// Replaces omega = 3/4 in the Q-DR closed-form check.
  std::optional<double> qdr_omega;
  /// Velocity restriction used by the adjointness and table checks.
  TransferConvention transfer = TransferConvention::Standard;
  std::uint64_t seed = 1;
  int k_max = 100;
};

struct Criterion {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriteriaCount = 12;

/// Runs criterion `id` (1-based). Exceptions become failures.
Criterion run_criterion(int id, const Options& options);

/// Runs all criteria in order, calling `on_done` after each.
std::vector<Criterion> run_all(const Options& options,
                               const std::function<void(const Criterion&)>& on_done = {});

/// "[PASS] 4  Table 1 (Q-DR) ... | detail (1.23 s)"
std::string format_line(const Criterion& c);

}  // namespace macmg::acceptance
