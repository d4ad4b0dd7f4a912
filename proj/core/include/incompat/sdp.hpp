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

/// A small dense semidefinite-program solver: complex Hermitian PSD block
/// variables, free scalar variables, and linear equality constraints. The
/// algorithm is a primal-dual path-following interior-point method on the
/// homogeneous self-dual embedding with Nesterov-Todd scaling, so primal
/// infeasibility is detected through the same iteration that certifies
/// optimality. Blocks are handled natively as complex Hermitian matrices.
///
/// A solve call is single-threaded and self-contained; distinct problems may
/// be solved concurrently.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "incompat/linalg.hpp"

namespace incompat {

enum class Sense { Maximize, Minimize };

/// A real-valued linear functional over (PSD blocks, free scalars):
///   value(x) = sum_b Re tr(coeff_b * X_b) + sum_j scalar_coefficients[j] * t_j.
/// Block coefficients are Hermitian, so the value is always real.
struct LinearTerm {
  std::vector<std::pair<int, HermitianOperator>> block_coefficients;
  std::vector<double> scalar_coefficients;
};

struct Equality {
  LinearTerm lhs;
  double rhs = 0.0;
  std::string name;  ///< diagnostic label, e.g. "marginal x=0 a=1 [2]"
};

/// Optional strictly interior primal start (blocks clamped positive definite
/// inside the solver).
struct SdpInitialPoint {
  std::vector<HermitianOperator> blocks;
  std::vector<double> scalars;
};

struct SdpProblem {
  std::vector<int> block_dims;
  int scalar_count = 0;
  Sense sense = Sense::Maximize;
  LinearTerm objective;
  std::vector<Equality> equalities;
  std::optional<SdpInitialPoint> initial_point;
};

enum class SdpStatus { Optimal, Infeasible, NumericalFailure };

/// Dual multiplier convention: with y = dual_multipliers,
///   Maximize:  sum_i y_i A_i^b - C_b  is PSD per block,
///              sum_i y_i a_i (scalar columns) = c (scalar objective),
///              and sum_i y_i rhs_i >= objective_value  (upper bound);
///   Minimize:  the same with both inequalities reversed.
struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  std::vector<HermitianOperator> primal_blocks;
  std::vector<double> primal_scalars;
  std::vector<double> dual_multipliers;  ///< one per equality (original order)
  double objective_value = 0.0;
  double gap = 0.0;  ///< |primal objective - dual bound|
  int iterations = 0;
  std::string detail;  ///< human-readable diagnostic
};

/// Solves the program. Optimal solutions are re-certified from scratch before
/// being returned (equality residuals <= tol.sdp_certify_residual, block
/// eigenvalues >= -tol.sdp_certify_psd, duality gap <= tol.sdp_certify_gap);
/// an iterate that cannot be certified is reported as NumericalFailure.
/// Infeasible means a dual improving ray was found and is returned in
/// dual_multipliers.
SdpSolution solve(const SdpProblem& p, const Tolerances& tol = {});

struct SdpViolation {
  std::string what;
  double magnitude;
};

/// Independent recheck of a solution against the problem using only linalg
/// primitives: every equality residual, every block's PSD margin, the
/// objective value, and (when multipliers are present) dual feasibility and
/// the duality gap. Empty report iff everything is within the certify
/// tolerances.
std::vector<SdpViolation> check_solution(const SdpProblem& p, const SdpSolution& s,
                                         const Tolerances& tol = {});

}  // namespace incompat
