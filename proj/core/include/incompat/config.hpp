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

#pragma once

namespace incompat {

/// Central numeric configuration. Every tolerance used by the library lives
/// here so that tests have a single tuning surface. The defaults are the
/// contract; loosening them weakens every downstream certificate check.
struct Tolerances {
  // Construction-time matrix checks.
  double hermiticity_defect = 1e-9;  ///< max |M_ij - conj(M_ji)| accepted
  double unitarity_defect = 1e-9;    ///< max entrywise |U^dag U - I| accepted

  // Hermitian eigensolver (cyclic Jacobi).
  double eig_off_diagonal = 1e-12;  ///< off-diagonal Frobenius mass at convergence
  int eig_max_sweeps = 64;
  double eig_reconstruction = 1e-8;  ///< ||M - V L V^dag||_F guarantee

  // POVM / assemblage invariants.
  double effect_psd = 1e-9;           ///< min eigenvalue of an effect >= -effect_psd
  double povm_sum = 1e-9;             ///< elementwise |sum_a A_a - I|
  double response_stochastic = 1e-12; ///< column sums of a response function
  double bloch_norm_slack = 1e-12;    ///< ||m|| <= 1 + slack

  // Semidefinite solver.
  double sdp_feas = 1e-9;             ///< primal/dual residual target
  double sdp_gap = 1e-8;              ///< duality-gap termination target
  double sdp_certify_residual = 1e-8; ///< equality residual certified on Optimal
  double sdp_certify_psd = 1e-8;      ///< PSD margin certified on Optimal
  double sdp_certify_gap = 1e-7;      ///< duality gap certified on Optimal
  double sdp_infeas = 1e-10;          ///< certificate quality for Infeasible
  int sdp_max_iterations = 200;
  double sdp_rank_tolerance = 1e-12;  ///< dependent-equality pruning (relative)
  bool sdp_warm_start = true;         ///< honor SdpProblem::initial_point

  // Robustness programs and certificates.
  double robustness_gap = 1e-6;   ///< |bound - eta_star| accepted in results
  double parent_check = 1e-8;     ///< parent-POVM invariant tolerance
  double certificate_check = 1e-8;///< dual-certificate invariant tolerance
  int block_cap = 4096;           ///< max outcome tuples per joint program

  // Alternating-projection feasibility oracle.
  int oracle_max_sweeps = 20000;
  double oracle_residual = 1e-7;

  // Hierarchy classification.
  double classification_eps = 1e-6;  ///< eta >= 1 - eps counts as 1
  int solve_budget = 4096;           ///< max per-subset solves in a full report
};

}  // namespace incompat
