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

#include "incompat/compat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace incompat {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// Hermitian basis in the order used for expanding matrix equalities into
// scalar rows: d diagonal units, then (real, imaginary) units per upper
// off-diagonal entry, normalized so that <E_e, M> recovers the e-th real
// coordinate of M.
std::vector<HermitianOperator> hermitian_basis(int d) {
  std::vector<HermitianOperator> basis;
  basis.reserve(static_cast<size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    std::vector<Complex> e(static_cast<size_t>(d) * d, Complex(0.0));
    e[static_cast<size_t>(i) * d + i] = 1.0;
    basis.push_back(HermitianOperator::from_entries(d, e));
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      std::vector<Complex> re(static_cast<size_t>(d) * d, Complex(0.0));
      re[static_cast<size_t>(i) * d + j] = 1.0 / kSqrt2;
      re[static_cast<size_t>(j) * d + i] = 1.0 / kSqrt2;
      basis.push_back(HermitianOperator::from_entries(d, re));
      std::vector<Complex> im(static_cast<size_t>(d) * d, Complex(0.0));
      im[static_cast<size_t>(i) * d + j] = Complex(0.0, 1.0 / kSqrt2);
      im[static_cast<size_t>(j) * d + i] = Complex(0.0, -1.0 / kSqrt2);
      basis.push_back(HermitianOperator::from_entries(d, im));
    }
  }
  return basis;
}

struct TupleSpace {
  std::vector<int> outcome_counts;           // per subset member
  std::vector<std::vector<int>> tuples;      // row-major, first member slowest
  long long total = 1;
};

TupleSpace make_tuple_space(const Assemblage& a, const SubsetIndex& subset) {
  TupleSpace ts;
  for (int x : subset.members()) {
    if (x >= a.size())
      throw BadRange("subset member " + std::to_string(x) + " outside assemblage of size " +
                     std::to_string(a.size()));
    ts.outcome_counts.push_back(a.measurement(x).outcome_count());
    ts.total *= ts.outcome_counts.back();
  }
  ts.tuples.reserve(static_cast<size_t>(ts.total));
  std::vector<int> cur(ts.outcome_counts.size(), 0);
  for (long long t = 0; t < ts.total; ++t) {
    ts.tuples.push_back(cur);
    for (int i = static_cast<int>(cur.size()) - 1; i >= 0; --i) {
      if (++cur[i] < ts.outcome_counts[i]) break;
      cur[i] = 0;
    }
  }
  return ts;
}

// tr(A) I / d - the fully noisy replacement of an effect.
HermitianOperator noise_floor(const HermitianOperator& a) {
  return (a.trace() / a.dim()) * HermitianOperator::identity(a.dim());
}

HermitianOperator noisy_effect(const HermitianOperator& a, double eta) {
  return eta * a + (1.0 - eta) * noise_floor(a);
}

double product_weight(const Assemblage& a, const SubsetIndex& subset,
                      const std::vector<int>& tuple) {
  double w = 1.0;
  for (size_t i = 0; i < tuple.size(); ++i) {
    const HermitianOperator& eff = a.measurement(subset.members()[i]).effect(tuple[i]);
    w *= eff.trace() / a.dim();
  }
  return w;
}

}  // namespace

SubsetIndex::SubsetIndex(std::vector<int> members) : members_(std::move(members)) {
  if (members_.empty()) throw BadRange("subset must be nonempty");
  for (size_t i = 0; i < members_.size(); ++i) {
    if (members_[i] < 0) throw BadRange("subset members must be nonnegative");
    if (i > 0 && members_[i] <= members_[i - 1])
      throw BadRange("subset members must be strictly increasing");
  }
}

SdpProblem build_jm_program(const Assemblage& a, const SubsetIndex& subset,
                            const Tolerances& tol) {
  const int d = a.dim();
  const int k = subset.size();
  TupleSpace ts = make_tuple_space(a, subset);
  if (ts.total > tol.block_cap)
    throw BlockCapExceeded("outcome tuple count " + std::to_string(ts.total) +
                           " exceeds block cap " + std::to_string(tol.block_cap));
  const int ntuples = static_cast<int>(ts.total);
  const std::vector<HermitianOperator> basis = hermitian_basis(d);
  const HermitianOperator ident = HermitianOperator::identity(d);

  SdpProblem prob;
  prob.sense = Sense::Maximize;
  prob.block_dims.assign(ntuples, d);
  prob.block_dims.push_back(1);  // eta lower slack
  prob.block_dims.push_back(1);  // eta upper slack
  prob.scalar_count = 1;
  prob.objective.scalar_coefficients = {1.0};

  // Completeness: sum_j G_j = I.
  for (int e = 0; e < d * d; ++e) {
    Equality eq;
    eq.name = "completeness[" + std::to_string(e) + "]";
    for (int j = 0; j < ntuples; ++j) eq.lhs.block_coefficients.emplace_back(j, basis[e]);
    eq.rhs = frobenius_inner(basis[e], ident);
    prob.equalities.push_back(std::move(eq));
  }

  // Marginals: sum_{j : j_i = a} G_j - eta (A - tr(A) I/d) = tr(A) I/d.
  for (int i = 0; i < k; ++i) {
    const int x = subset.members()[i];
    const Povm& povm = a.measurement(x);
    for (int out = 0; out < povm.outcome_count(); ++out) {
      const HermitianOperator& eff = povm.effect(out);
      const HermitianOperator floor_term = noise_floor(eff);
      const HermitianOperator depolarized = eff - floor_term;
      for (int e = 0; e < d * d; ++e) {
        Equality eq;
        eq.name = "marginal x=" + std::to_string(x) + " a=" + std::to_string(out) + " [" +
                  std::to_string(e) + "]";
        for (int j = 0; j < ntuples; ++j)
          if (ts.tuples[j][i] == out) eq.lhs.block_coefficients.emplace_back(j, basis[e]);
        eq.lhs.scalar_coefficients = {-frobenius_inner(basis[e], depolarized)};
        eq.rhs = frobenius_inner(basis[e], floor_term);
        prob.equalities.push_back(std::move(eq));
      }
    }
  }

  // eta - s_lo = 0 and eta + s_hi = 1.
  {
    Equality lo;
    lo.name = "eta lower slack";
    lo.lhs.block_coefficients.emplace_back(ntuples, -1.0 * HermitianOperator::identity(1));
    lo.lhs.scalar_coefficients = {1.0};
    lo.rhs = 0.0;
    prob.equalities.push_back(std::move(lo));
    Equality hi;
    hi.name = "eta upper slack";
    hi.lhs.block_coefficients.emplace_back(ntuples + 1, HermitianOperator::identity(1));
    hi.lhs.scalar_coefficients = {1.0};
    hi.rhs = 1.0;
    prob.equalities.push_back(std::move(hi));
  }

  // Strictly interior start: the eta = 0 assemblage always admits the
  // product-weight parent, shifted off the boundary by a small identity term.
  {
    SdpInitialPoint init;
    const double eta0 = 0.01;
    const double shift = 0.01 / ntuples;
    for (int j = 0; j < ntuples; ++j) {
      init.blocks.push_back((product_weight(a, subset, ts.tuples[j]) + shift) * ident);
    }
    std::vector<Complex> lo = {Complex(eta0)};
    std::vector<Complex> hi = {Complex(1.0 - eta0)};
    init.blocks.push_back(HermitianOperator::from_entries(1, lo));
    init.blocks.push_back(HermitianOperator::from_entries(1, hi));
    init.scalars = {eta0};
    prob.initial_point = std::move(init);
  }
  return prob;
}

namespace {

DualCertificate extract_certificate(const Assemblage& a, const SubsetIndex& subset,
                                    const TupleSpace& ts, const std::vector<double>& y) {
  const int d = a.dim();
  const int k = subset.size();
  const std::vector<HermitianOperator> basis = hermitian_basis(d);
  const int dd = d * d;

  HermitianOperator completeness_dual(d);
  for (int e = 0; e < dd; ++e) completeness_dual += y[e] * basis[e];

  DualCertificate cert;
  int base = dd;
  for (int i = 0; i < k; ++i) {
    const int outcomes = ts.outcome_counts[i];
    std::vector<HermitianOperator> xi;
    for (int out = 0; out < outcomes; ++out) {
      HermitianOperator z(d);
      for (int e = 0; e < dd; ++e) z += y[base + e] * basis[e];
      base += dd;
      // Spreading the completeness multiplier over the members keeps the
      // tuple sums equal to the raw dual slack.
      xi.push_back(z + (1.0 / k) * completeness_dual);
    }
    cert.operators.push_back(std::move(xi));
  }

  double pairing = 0.0;
  for (int i = 0; i < k; ++i) {
    const Povm& povm = a.measurement(subset.members()[i]);
    for (int out = 0; out < povm.outcome_count(); ++out)
      pairing += frobenius_inner(cert.operators[i][out], povm.effect(out));
  }
  cert.bound = 1.0 + pairing;
  return cert;
}

ParentPovm extract_parent(int dim, const TupleSpace& ts, const std::vector<HermitianOperator>& blocks) {
  ParentPovm parent;
  parent.dim = dim;
  parent.outcome_tuples = ts.tuples;
  parent.elements.assign(blocks.begin(), blocks.begin() + ts.tuples.size());
  return parent;
}

}  // namespace

RobustnessResult robustness(const Assemblage& a, const SubsetIndex& subset,
                            const Tolerances& tol) {
  SdpProblem prob = build_jm_program(a, subset, tol);
  TupleSpace ts = make_tuple_space(a, subset);

  SdpSolution sol = solve(prob, tol);
  if (sol.status == SdpStatus::Infeasible)
    throw SolverFailure("joint-measurability program infeasible: " + sol.detail);
  if (sol.status != SdpStatus::Optimal)
    throw SolverFailure("robustness solve failed: " + sol.detail);

  RobustnessResult result{.subset = subset,
                          .eta_star = std::clamp(sol.primal_scalars[0], 0.0, 1.0),
                          .parent = {},
                          .parent_at_interior = false,
                          .certificate = {},
                          .gap = 0.0,
                          .iterations = sol.iterations};
  result.parent = extract_parent(a.dim(), ts, sol.primal_blocks);
  result.certificate = extract_certificate(a, subset, ts, sol.dual_multipliers);
  result.gap = result.certificate.bound - result.eta_star;

  const auto cert_report = verify_certificate(a, subset, result.certificate, tol);
  if (!cert_report.empty())
    throw SolverFailure("dual certificate failed validation: " + cert_report.front().what);
  if (std::abs(result.gap) > tol.robustness_gap)
    throw SolverFailure("certificate bound " + std::to_string(result.certificate.bound) +
                        " is not within tolerance of eta* " + std::to_string(result.eta_star));

  NoiseSpec at_opt = NoiseSpec::uniform(result.eta_star, subset.size());
  auto parent_report = verify_parent(a, subset, at_opt, result.parent, tol);
  if (!parent_report.empty()) {
    // Degenerate boundary witness: re-solve strictly inside the feasible set
    // with eta pinned just below the optimum.
    const double eta_in = std::max(0.0, result.eta_star - 1e-6);
    SdpProblem pinned = prob;
    pinned.objective = LinearTerm{};
    Equality pin;
    pin.name = "eta pinned";
    pin.lhs.scalar_coefficients = {1.0};
    pin.rhs = eta_in;
    pinned.equalities.push_back(std::move(pin));
    SdpSolution inner = solve(pinned, tol);
    if (inner.status != SdpStatus::Optimal)
      throw SolverFailure("interior witness re-solve failed: " + inner.detail);
    result.parent = extract_parent(a.dim(), ts, inner.primal_blocks);
    result.parent_at_interior = true;
    auto retry = verify_parent(a, subset, NoiseSpec::uniform(eta_in, subset.size()),
                               result.parent, tol);
    if (!retry.empty())
      throw SolverFailure("parent witness failed validation: " + retry.front().what);
  }
  return result;
}

bool pairwise_compatible_noisy(const std::array<double, 3>& m1, const std::array<double, 3>& m2,
                               double eta1, double eta2, const Tolerances& tol) {
  const double n1 = std::sqrt(m1[0] * m1[0] + m1[1] * m1[1] + m1[2] * m1[2]);
  const double n2 = std::sqrt(m2[0] * m2[0] + m2[1] * m2[1] + m2[2] * m2[2]);
  if (std::abs(n1 - 1.0) > tol.hermiticity_defect || std::abs(n2 - 1.0) > tol.hermiticity_defect)
    throw NotUnit("Bloch axes must be unit vectors");
  const double dot = m1[0] * m2[0] + m1[1] * m2[1] + m1[2] * m2[2];
  if (std::abs(dot) > tol.hermiticity_defect)
    throw NotOrthogonal("Bloch axes must be orthogonal");
  return eta1 * eta1 + eta2 * eta2 <= 1.0 + 1e-12;
}

std::vector<CompatViolation> verify_parent(const Assemblage& a, const SubsetIndex& subset,
                                           const NoiseSpec& eta, const ParentPovm& g,
                                           const Tolerances& tol) {
  const int d = a.dim();
  const int k = subset.size();
  if (eta.size() != k) throw ShapeMismatch("noise spec length must equal subset size");
  TupleSpace ts = make_tuple_space(a, subset);
  if (g.dim != d || g.outcome_tuples != ts.tuples ||
      g.elements.size() != ts.tuples.size())
    throw ShapeMismatch("parent POVM does not match the subset's outcome tuple space");

  std::vector<CompatViolation> report;
  for (size_t j = 0; j < g.elements.size(); ++j) {
    const double lo = min_eigenvalue(g.elements[j], tol);
    if (lo < -tol.parent_check) {
      std::string tup;
      for (int v : ts.tuples[j]) tup += std::to_string(v);
      report.push_back({"parent element (" + tup + ") not PSD", -lo});
    }
  }

  HermitianOperator total(d);
  for (const auto& e : g.elements) total += e;
  total -= HermitianOperator::identity(d);
  double defect = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) defect = std::max(defect, std::abs(total(i, j)));
  if (defect > tol.parent_check) report.push_back({"completeness defect", defect});

  for (int i = 0; i < k; ++i) {
    const Povm& povm = a.measurement(subset.members()[i]);
    for (int out = 0; out < povm.outcome_count(); ++out) {
      HermitianOperator marg(d);
      for (size_t j = 0; j < g.elements.size(); ++j)
        if (ts.tuples[j][i] == out) marg += g.elements[j];
      marg -= noisy_effect(povm.effect(out), eta.eta(i));
      double md = 0.0;
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) md = std::max(md, std::abs(marg(r, c)));
      if (md > tol.parent_check)
        report.push_back({"marginal defect x=" + std::to_string(subset.members()[i]) +
                              " a=" + std::to_string(out),
                          md});
    }
  }
  return report;
}

std::vector<CompatViolation> verify_certificate(const Assemblage& a, const SubsetIndex& subset,
                                                const DualCertificate& c,
                                                const Tolerances& tol) {
  const int d = a.dim();
  const int k = subset.size();
  TupleSpace ts = make_tuple_space(a, subset);
  if (static_cast<int>(c.operators.size()) != k)
    throw ShapeMismatch("certificate must carry one operator list per subset member");
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(c.operators[i].size()) != ts.outcome_counts[i])
      throw ShapeMismatch("certificate operator count mismatch for member " + std::to_string(i));
    for (const auto& op : c.operators[i])
      if (op.dim() != d) throw ShapeMismatch("certificate operator dimension mismatch");
  }

  std::vector<CompatViolation> report;
  for (const auto& tuple : ts.tuples) {
    HermitianOperator sum(d);
    for (int i = 0; i < k; ++i) sum += c.operators[i][tuple[i]];
    const double lo = min_eigenvalue(sum, tol);
    if (lo < -tol.certificate_check) {
      std::string tup;
      for (int v : tuple) tup += std::to_string(v);
      report.push_back({"tuple (" + tup + ") operator sum not PSD", -lo});
    }
  }

  double pairing = 0.0;
  double trace_side = 0.0;
  for (int i = 0; i < k; ++i) {
    const Povm& povm = a.measurement(subset.members()[i]);
    for (int out = 0; out < povm.outcome_count(); ++out) {
      pairing += frobenius_inner(c.operators[i][out], povm.effect(out));
      trace_side += c.operators[i][out].trace() * povm.effect(out).trace();
    }
  }
  const double lhs = 1.0 + pairing;
  const double rhs = trace_side / d;
  if (lhs < rhs - tol.certificate_check)
    report.push_back({"normalization inequality violated", rhs - lhs});
  if (std::abs(c.bound - lhs) > tol.certificate_check)
    report.push_back({"bound differs from 1 + sum tr(X A)", std::abs(c.bound - lhs)});
  return report;
}

OracleVerdict ap_feasibility_oracle(const Assemblage& a, const SubsetIndex& subset,
                                    const NoiseSpec& eta, const Tolerances& tol) {
  const int d = a.dim();
  const int k = subset.size();
  if (eta.size() != k) throw ShapeMismatch("noise spec length must equal subset size");
  TupleSpace ts = make_tuple_space(a, subset);
  if (ts.total > tol.block_cap)
    throw BlockCapExceeded("outcome tuple count exceeds block cap");
  const int ntuples = static_cast<int>(ts.total);
  const int dd = d * d;

  // Constraint pattern over tuple space (identical for every matrix
  // coordinate): completeness plus one row per (member, outcome).
  std::vector<std::vector<int>> row_support;  // tuples touched per pattern row
  std::vector<std::vector<double>> row_rhs;   // svec target per pattern row
  {
    std::vector<int> all(ntuples);
    std::iota(all.begin(), all.end(), 0);
    row_support.push_back(all);
    std::vector<double> rhs_id(dd);
    const std::vector<HermitianOperator> basis = hermitian_basis(d);
    for (int e = 0; e < dd; ++e)
      rhs_id[e] = frobenius_inner(basis[e], HermitianOperator::identity(d));
    row_rhs.push_back(rhs_id);
    for (int i = 0; i < k; ++i) {
      const Povm& povm = a.measurement(subset.members()[i]);
      for (int out = 0; out < povm.outcome_count(); ++out) {
        std::vector<int> support;
        for (int j = 0; j < ntuples; ++j)
          if (ts.tuples[j][i] == out) support.push_back(j);
        row_support.push_back(std::move(support));
        const HermitianOperator target = noisy_effect(povm.effect(out), eta.eta(i));
        std::vector<double> rhs(dd);
        for (int e = 0; e < dd; ++e) rhs[e] = frobenius_inner(basis[e], target);
        row_rhs.push_back(std::move(rhs));
      }
    }
  }
  const int nrows = static_cast<int>(row_support.size());

  // Gram of the pattern rows; prune dependent rows with pivoted Cholesky.
  std::vector<double> gram(static_cast<size_t>(nrows) * nrows, 0.0);
  for (int i = 0; i < nrows; ++i) {
    for (int j = 0; j <= i; ++j) {
      std::vector<char> mark(ntuples, 0);
      for (int t : row_support[i]) mark[t] = 1;
      double common = 0.0;
      for (int t : row_support[j]) common += mark[t];
      gram[static_cast<size_t>(i) * nrows + j] = common;
      gram[static_cast<size_t>(j) * nrows + i] = common;
    }
  }
  std::vector<int> kept;
  std::vector<double> lfac(static_cast<size_t>(nrows) * nrows, 0.0);
  {
    std::vector<int> perm(nrows);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> diag(nrows);
    for (int i = 0; i < nrows; ++i) diag[i] = gram[static_cast<size_t>(i) * nrows + i];
    const double dtol = 1e-10 * *std::max_element(diag.begin(), diag.end());
    int rank = 0;
    for (int t = 0; t < nrows; ++t) {
      int best = t;
      for (int i = t + 1; i < nrows; ++i)
        if (diag[perm[i]] > diag[perm[best]]) best = i;
      if (best != t) {
        std::swap(perm[t], perm[best]);
        for (int k = 0; k < t; ++k)
          std::swap(lfac[static_cast<size_t>(t) * nrows + k],
                    lfac[static_cast<size_t>(best) * nrows + k]);
      }
      if (diag[perm[t]] <= dtol) break;
      const double piv = std::sqrt(diag[perm[t]]);
      lfac[static_cast<size_t>(t) * nrows + t] = piv;
      for (int i = t + 1; i < nrows; ++i) {
        double v = gram[static_cast<size_t>(perm[i]) * nrows + perm[t]];
        for (int q = 0; q < t; ++q)
          v -= lfac[static_cast<size_t>(i) * nrows + q] * lfac[static_cast<size_t>(t) * nrows + q];
        v /= piv;
        lfac[static_cast<size_t>(i) * nrows + t] = v;
        diag[perm[i]] -= v * v;
      }
      ++rank;
    }
    kept.assign(perm.begin(), perm.begin() + rank);
    // lfac rows follow the perm order of `kept`.
  }
  const int nkept = static_cast<int>(kept.size());

  // State: one svec per tuple block, initialized at the product-weight
  // parent of the fully noisy assemblage.
  std::vector<std::vector<double>> v(ntuples, std::vector<double>(dd, 0.0));
  for (int j = 0; j < ntuples; ++j) {
    const double w = product_weight(a, subset, ts.tuples[j]);
    for (int i = 0; i < d; ++i) v[j][i] = w;  // diagonal coordinates of w*I
  }

  auto residual_row = [&](int r, int e) {
    double s = 0.0;
    for (int t : row_support[r]) s += v[t][e];
    return s - row_rhs[r][e];
  };

  const Tolerances eig_tol = tol;
  for (int sweep = 0; sweep < tol.oracle_max_sweeps; ++sweep) {
    // Affine projection, coordinate by coordinate (patterns are shared).
    for (int e = 0; e < dd; ++e) {
      std::vector<double> rres(nkept);
      for (int r = 0; r < nkept; ++r) rres[r] = residual_row(kept[r], e);
      // Solve (L L^T) w = rres in the pivoted order.
      for (int r = 0; r < nkept; ++r) {
        for (int q = 0; q < r; ++q) rres[r] -= lfac[static_cast<size_t>(r) * nrows + q] * rres[q];
        rres[r] /= lfac[static_cast<size_t>(r) * nrows + r];
      }
      for (int r = nkept - 1; r >= 0; --r) {
        for (int q = r + 1; q < nkept; ++q)
          rres[r] -= lfac[static_cast<size_t>(q) * nrows + r] * rres[q];
        rres[r] /= lfac[static_cast<size_t>(r) * nrows + r];
      }
      for (int r = 0; r < nkept; ++r) {
        const double w = rres[r];
        if (w == 0.0) continue;
        for (int t : row_support[kept[r]]) v[t][e] -= w;
      }
    }

    // PSD projection per tuple block, tracking the largest clamp.
    double cone_defect = 0.0;
    for (int j = 0; j < ntuples; ++j) {
      // Rebuild the Hermitian matrix from its svec coordinates.
      ComplexMatrix m(d, d);
      int idx = 0;
      for (int i = 0; i < d; ++i) m(i, i) = v[j][idx++];
      for (int i = 0; i < d; ++i)
        for (int c = i + 1; c < d; ++c) {
          const double re = v[j][idx++] / kSqrt2;
          const double im = v[j][idx++] / kSqrt2;
          m(i, c) = Complex(re, im);
          m(c, i) = Complex(re, -im);
        }
      HermitianOperator h = HermitianOperator::from_matrix(m, eig_tol);
      EigenDecomposition eig = hermitian_eigendecomposition(h, eig_tol);
      if (eig.values.front() >= 0.0) continue;
      cone_defect = std::max(cone_defect, -eig.values.front());
      ComplexMatrix clamped(d, d);
      for (int q = 0; q < d; ++q) {
        const double lam = std::max(eig.values[q], 0.0);
        if (lam == 0.0) continue;
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c)
            clamped(r, c) += lam * eig.vectors(r, q) * std::conj(eig.vectors(c, q));
      }
      idx = 0;
      for (int i = 0; i < d; ++i) v[j][idx++] = clamped(i, i).real();
      for (int i = 0; i < d; ++i)
        for (int c = i + 1; c < d; ++c) {
          v[j][idx++] = kSqrt2 * clamped(i, c).real();
          v[j][idx++] = kSqrt2 * clamped(i, c).imag();
        }
    }

    double affine_defect = 0.0;
    for (int r = 0; r < nrows; ++r)
      for (int e = 0; e < dd; ++e)
        affine_defect = std::max(affine_defect, std::abs(residual_row(r, e)));

    if (std::max(cone_defect, affine_defect) < tol.oracle_residual)
      return OracleVerdict::Feasible;
  }
  return OracleVerdict::Undetermined;
}

}  // namespace incompat
