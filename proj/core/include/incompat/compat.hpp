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

/// Joint measurability as a semidefinite program. A subset of an assemblage is
/// compatible iff a parent POVM exists: PSD elements G_j indexed by outcome
/// tuples, summing to identity, whose marginals reproduce every member. The
/// noise robustness eta* of a subset is the largest uniform visibility at
/// which the noisy subset stays compatible; it is computed by one SDP solve
/// with eta as a scalar variable, and every result carries both a primal
/// witness (the parent) and a dual certificate (operators upper-bounding
/// eta*).

#pragma once

#include <array>
#include <vector>

#include "incompat/povm.hpp"
#include "incompat/sdp.hpp"

namespace incompat {

/// Strictly increasing measurement indices. Bounds against a concrete
/// assemblage are checked by the operations that take one.
class SubsetIndex {
 public:
  explicit SubsetIndex(std::vector<int> members);

  int size() const { return static_cast<int>(members_.size()); }
  const std::vector<int>& members() const { return members_; }
  bool operator==(const SubsetIndex& rhs) const = default;

 private:
  std::vector<int> members_;
};

/// Common refinement witness for a subset: one element per outcome tuple.
/// outcome_tuples[t][i] is the outcome of subset member i in tuple t.
struct ParentPovm {
  int dim = 0;
  std::vector<std::vector<int>> outcome_tuples;
  std::vector<HermitianOperator> elements;
};

/// Dual witness: operators[i][a] = X_{a|x} for subset member i. Feasibility
/// means every tuple sum  sum_i X_{j_i | x_i}  is PSD and the normalization
/// inequality  1 + sum tr(X A) >= (1/d) sum tr(X) tr(A)  holds; then
/// bound = 1 + sum tr(X A) upper-bounds eta*.
struct DualCertificate {
  std::vector<std::vector<HermitianOperator>> operators;
  double bound = 1.0;
};

struct CompatViolation {
  std::string what;
  double magnitude;
};

struct RobustnessResult {
  SubsetIndex subset;
  double eta_star = 1.0;
  ParentPovm parent;
  /// True when the parent had to be re-solved slightly inside the boundary
  /// (at eta_star - 1e-6) because the optimum witness was degenerate.
  bool parent_at_interior = false;
  DualCertificate certificate;
  double gap = 0.0;  ///< certificate.bound - eta_star
  int iterations = 0;
};

/// Expands the compatibility predicate of the noisy subset into an SDP:
/// maximize the scalar eta subject to PSD blocks {G_j} (one per outcome
/// tuple) with  sum_j G_j = I  and per-member marginals
/// sum_{j : j_i = a} G_j = eta A_{a|x} + (1 - eta) tr(A_{a|x}) I / d.
/// eta in [0,1] is enforced through two 1x1 slack blocks appended after the
/// tuple blocks. A strictly interior start built from the eta = 0 product
/// parent is attached. Throws BlockCapExceeded when the tuple count exceeds
/// tol.block_cap, BadRange for subset indices outside the assemblage.
SdpProblem build_jm_program(const Assemblage& a, const SubsetIndex& subset,
                            const Tolerances& tol = {});

/// Solves the program and validates both witnesses before returning.
/// eta_star = 1 iff the subset assemblage is compatible. Throws SolverFailure
/// when the solve or a witness check fails.
RobustnessResult robustness(const Assemblage& a, const SubsetIndex& subset,
                            const Tolerances& tol = {});

/// Analytic pairwise criterion for orthogonal unit Bloch axes with
/// per-measurement noise: compatible iff eta1^2 + eta2^2 <= 1 (boundary
/// included). Throws NotOrthogonal / NotUnit on bad axes.
bool pairwise_compatible_noisy(const std::array<double, 3>& m1, const std::array<double, 3>& m2,
                               double eta1, double eta2, const Tolerances& tol = {});

/// Rechecks the three parent invariants (PSD, completeness, marginals)
/// against the eta-noised subset. The noise spec has one entry per subset
/// member, in subset order. Empty report iff valid at tol.parent_check.
std::vector<CompatViolation> verify_parent(const Assemblage& a, const SubsetIndex& subset,
                                           const NoiseSpec& eta, const ParentPovm& g,
                                           const Tolerances& tol = {});

/// Rechecks the dual-certificate constraints and the bound value against the
/// (un-noised) subset effects. Empty report iff valid at
/// tol.certificate_check; a valid certificate implies eta* <= bound.
std::vector<CompatViolation> verify_certificate(const Assemblage& a, const SubsetIndex& subset,
                                                const DualCertificate& c,
                                                const Tolerances& tol = {});

enum class OracleVerdict { Feasible, Undetermined };

/// Independent cross-check of the SDP: alternating projections between the
/// PSD product cone and the affine set {completeness + marginals} at fixed
/// noise. Declares Feasible when the combined residual drops below
/// tol.oracle_residual within tol.oracle_max_sweeps sweeps; never claims
/// infeasibility. The noise spec has one entry per subset member.
OracleVerdict ap_feasibility_oracle(const Assemblage& a, const SubsetIndex& subset,
                                    const NoiseSpec& eta, const Tolerances& tol = {});

}  // namespace incompat
