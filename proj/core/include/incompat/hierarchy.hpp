// Copyright 2026 The incompat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// The incompatibility hierarchy: per-k extremes of the subset robustness
/// values and the classification they induce.
///
/// For an assemblage with n members and 2 <= k <= n, eta_min(k) and
/// eta_max(k) are the minimum and maximum of eta* over all k-member subsets.
/// The level classifies as
///   compatible              when eta_min = eta_max = 1,
///   incompatible-not-strong when eta_min < 1 and eta_max = 1,
///   strong-incompatible     when eta_max < 1,
/// with "= 1" decided at a configurable tolerance. An assemblage is genuinely
/// (strong) incompatible at k when it is compatible at k-1 and (strong)
/// incompatible at k; 1-member subsets are compatible by definition, so at
/// k = 2 the genuine flags coincide with the plain ones.

#pragma once

#include <vector>

#include "incompat/compat.hpp"

namespace incompat {

enum class CompatibilityLabel { Compatible, IncompatibleNotStrong, StrongIncompatible };

/// "compatible" / "incompatible-not-strong" / "strong-incompatible".
const char* label_name(CompatibilityLabel label);

/// Pure decision table for the classification, parameterized by the
/// tolerance used for the "eta equals 1" tests.
struct ClassificationRules {
  double epsilon = 1e-6;

  bool counts_as_one(double eta) const { return eta >= 1.0 - epsilon; }

  CompatibilityLabel label(double eta_min, double eta_max) const {
    if (counts_as_one(eta_min)) return CompatibilityLabel::Compatible;
    if (counts_as_one(eta_max)) return CompatibilityLabel::IncompatibleNotStrong;
    return CompatibilityLabel::StrongIncompatible;
  }
};

struct SubsetRobustness {
  SubsetIndex subset;
  double eta_star;
  double bound;
  double gap;
  int iterations;
};

struct HierarchyLevel {
  int k = 0;
  double eta_min = 1.0;
  double eta_max = 1.0;
  std::vector<SubsetRobustness> per_subset;  ///< lexicographic subset order
};

struct LevelClassification {
  CompatibilityLabel label = CompatibilityLabel::Compatible;
  bool genuinely_incompatible = false;
  bool genuinely_strong_incompatible = false;
};

/// Uniform-noise window (eta_low, eta_high] in which the noisy assemblage is
/// (n,k)-genuinely strong incompatible; reported only when
/// eta_max(k) < eta_min(k-1).
struct GenuineStrongWindow {
  int k = 0;
  double eta_low = 0.0;
  double eta_high = 0.0;
};

struct HierarchyReport {
  int n = 0;
  int dim = 0;
  std::vector<HierarchyLevel> levels;           ///< k = 2..n
  std::vector<LevelClassification> labels;      ///< aligned with levels
  std::vector<GenuineStrongWindow> windows;
  bool overall_compatible = true;               ///< iff compatible at k = n
};

/// All C(n,k) subsets in lexicographic order. Throws BadRange unless
/// 1 <= k <= n.
std::vector<SubsetIndex> enumerate_subsets(int n, int k);

/// Robustness of every k-member subset (solved concurrently, aggregated in
/// lexicographic order). Requires 2 <= k <= n.
HierarchyLevel level(const Assemblage& a, int k, const Tolerances& tol = {});

/// Classification at one k, including the genuine flags (which reference
/// level k-1 when k >= 3).
LevelClassification classify_at(const Assemblage& a, int k, const Tolerances& tol = {});

/// Levels and labels for every k = 2..n plus the genuine-strong windows.
/// For n = 1 the level list is empty and the report is compatible. Throws
/// BudgetExceeded when the total number of subset solves would exceed
/// tol.solve_budget.
HierarchyReport full_report(const Assemblage& a, const Tolerances& tol = {});

}  // namespace incompat
