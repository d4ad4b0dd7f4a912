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

#include "incompat/hierarchy.hpp"

#include <algorithm>
#include <exception>
#include <optional>
#include <thread>

namespace incompat {

const char* label_name(CompatibilityLabel label) {
  switch (label) {
    case CompatibilityLabel::Compatible:
      return "compatible";
    case CompatibilityLabel::IncompatibleNotStrong:
      return "incompatible-not-strong";
    case CompatibilityLabel::StrongIncompatible:
      return "strong-incompatible";
  }
  return "unknown";
}

std::vector<SubsetIndex> enumerate_subsets(int n, int k) {
  if (k < 1 || k > n) throw BadRange("need 1 <= k <= n");
  std::vector<SubsetIndex> out;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  while (true) {
    out.push_back(SubsetIndex(cur));
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

namespace {

long long binomial(int n, int k) {
  long long v = 1;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

// Per-subset solves are independent; run them on a small pool and aggregate
// in subset order.
std::vector<SubsetRobustness> solve_subsets(const Assemblage& a,
                                            const std::vector<SubsetIndex>& subsets,
                                            const Tolerances& tol) {
  const int count = static_cast<int>(subsets.size());
  std::vector<std::optional<SubsetRobustness>> slots(count);
  std::vector<std::exception_ptr> errors(count);

  const int workers =
      std::max(1, std::min<int>(count, static_cast<int>(std::thread::hardware_concurrency())));
  auto run_range = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        RobustnessResult r = robustness(a, subsets[i], tol);
        slots[i] = SubsetRobustness{subsets[i], r.eta_star, r.certificate.bound, r.gap,
                                    r.iterations};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run_range(0, count);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(count, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (auto& t : pool) t.join();
  }
  for (int i = 0; i < count; ++i)
    if (errors[i]) std::rethrow_exception(errors[i]);

  std::vector<SubsetRobustness> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(std::move(*slots[i]));
  return out;
}

LevelClassification classify(const HierarchyLevel& lvl, const HierarchyLevel* prev,
                             const ClassificationRules& rules) {
  LevelClassification cls;
  cls.label = rules.label(lvl.eta_min, lvl.eta_max);
  const bool incompatible = !rules.counts_as_one(lvl.eta_min);
  const bool strong = !rules.counts_as_one(lvl.eta_max);
  // Every 1-member subset is compatible (a POVM is its own refinement), so at
  // k = 2 the previous level counts as compatible.
  const bool prev_compatible = prev == nullptr || rules.counts_as_one(prev->eta_min);
  cls.genuinely_incompatible = prev_compatible && incompatible;
  cls.genuinely_strong_incompatible = prev_compatible && strong;
  return cls;
}

}  // namespace

HierarchyLevel level(const Assemblage& a, int k, const Tolerances& tol) {
  if (k < 2 || k > a.size()) throw BadRange("need 2 <= k <= n for a hierarchy level");
  const std::vector<SubsetIndex> subsets = enumerate_subsets(a.size(), k);
  HierarchyLevel lvl;
  lvl.k = k;
  lvl.per_subset = solve_subsets(a, subsets, tol);
  lvl.eta_min = lvl.per_subset.front().eta_star;
  lvl.eta_max = lvl.per_subset.front().eta_star;
  for (const auto& s : lvl.per_subset) {
    lvl.eta_min = std::min(lvl.eta_min, s.eta_star);
    lvl.eta_max = std::max(lvl.eta_max, s.eta_star);
  }
  return lvl;
}

LevelClassification classify_at(const Assemblage& a, int k, const Tolerances& tol) {
  const ClassificationRules rules{tol.classification_eps};
  HierarchyLevel lvl = level(a, k, tol);
  if (k == 2) return classify(lvl, nullptr, rules);
  HierarchyLevel prev = level(a, k - 1, tol);
  return classify(lvl, &prev, rules);
}

HierarchyReport full_report(const Assemblage& a, const Tolerances& tol) {
  HierarchyReport report;
  report.n = a.size();
  report.dim = a.dim();
  if (a.size() == 1) {
    report.overall_compatible = true;
    return report;
  }

  long long total = 0;
  for (int k = 2; k <= a.size(); ++k) total += binomial(a.size(), k);
  if (total > tol.solve_budget)
    throw BudgetExceeded("full report needs " + std::to_string(total) +
                         " subset solves, budget is " + std::to_string(tol.solve_budget));

  const ClassificationRules rules{tol.classification_eps};
  for (int k = 2; k <= a.size(); ++k) report.levels.push_back(level(a, k, tol));

  for (size_t i = 0; i + 1 < report.levels.size(); ++i) {
    const HierarchyLevel& cur = report.levels[i];
    const HierarchyLevel& next = report.levels[i + 1];
    if (cur.eta_min < next.eta_min - tol.robustness_gap ||
        cur.eta_max < next.eta_max - tol.robustness_gap)
      throw SolverFailure("hierarchy monotonicity violated between k=" + std::to_string(cur.k) +
                          " and k=" + std::to_string(next.k));
    if (next.eta_max < cur.eta_min)
      report.windows.push_back({next.k, next.eta_max, cur.eta_min});
  }

  for (size_t i = 0; i < report.levels.size(); ++i) {
    const HierarchyLevel* prev = i == 0 ? nullptr : &report.levels[i - 1];
    report.labels.push_back(classify(report.levels[i], prev, rules));
  }
  report.overall_compatible = report.labels.back().label == CompatibilityLabel::Compatible;
  return report;
}

}  // namespace incompat
