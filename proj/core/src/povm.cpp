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

#include "incompat/povm.hpp"

#include <cmath>
#include <utility>

namespace incompat {

Povm::Povm(std::vector<HermitianOperator> effects, std::string label)
    : effects_(std::move(effects)), label_(std::move(label)) {
  if (effects_.empty()) throw BadRange("a POVM needs at least one effect");
  dim_ = effects_.front().dim();
  for (const auto& e : effects_)
    if (e.dim() != dim_) throw DimensionMismatch("POVM effects must share one dimension");
}

std::vector<PovmViolation> validate(const Povm& p, const Tolerances& tol) {
  std::vector<PovmViolation> report;
  for (int a = 0; a < p.outcome_count(); ++a) {
    const double lo = min_eigenvalue(p.effect(a), tol);
    if (lo < -tol.effect_psd) {
      report.push_back({"effect not positive semidefinite", a, -lo});
    }
  }
  HermitianOperator sum(p.dim());
  for (const auto& e : p.effects()) sum += e;
  sum -= HermitianOperator::identity(p.dim());
  double defect = 0.0;
  for (int i = 0; i < p.dim(); ++i)
    for (int j = 0; j < p.dim(); ++j) defect = std::max(defect, std::abs(sum(i, j)));
  if (defect > tol.povm_sum) {
    report.push_back({"effects do not sum to identity", -1, defect});
  }
  return report;
}

Assemblage::Assemblage(std::vector<Povm> measurements) : measurements_(std::move(measurements)) {
  if (measurements_.empty()) throw BadRange("an assemblage needs at least one measurement");
  dim_ = measurements_.front().dim();
  for (const auto& m : measurements_)
    if (m.dim() != dim_) throw DimensionMismatch("assemblage measurements must share one dimension");
}

NoiseSpec::NoiseSpec(std::vector<double> per_measurement) : eta_(std::move(per_measurement)) {
  if (eta_.empty()) throw BadRange("noise spec must be nonempty");
  for (double e : eta_)
    if (!(e >= 0.0 && e <= 1.0)) throw BadRange("noise parameter outside [0, 1]");
}

NoiseSpec NoiseSpec::uniform(double eta, int n) {
  if (n < 1) throw BadRange("noise spec must be nonempty");
  return NoiseSpec(std::vector<double>(static_cast<size_t>(n), eta));
}

ResponseFunction::ResponseFunction(int output_count, int input_count,
                                   std::vector<double> p_row_major, const Tolerances& tol)
    : outputs_(output_count), inputs_(input_count), table_(std::move(p_row_major)) {
  if (outputs_ < 1 || inputs_ < 1) throw BadRange("response function needs >= 1 outcomes");
  if (table_.size() != static_cast<size_t>(outputs_) * inputs_)
    throw ShapeMismatch("response table size does not match shape");
  for (double v : table_)
    if (!(v >= -tol.response_stochastic) || !std::isfinite(v))
      throw BadRange("response probabilities must be nonnegative");
  for (int b = 0; b < inputs_; ++b) {
    double col = 0.0;
    for (int a = 0; a < outputs_; ++a) col += p(a, b);
    if (std::abs(col - 1.0) > tol.response_stochastic)
      throw BadRange("response column " + std::to_string(b) + " is not stochastic");
  }
}

ResponseFunction ResponseFunction::identity(int count) {
  std::vector<double> t(static_cast<size_t>(count) * count, 0.0);
  for (int i = 0; i < count; ++i) t[static_cast<size_t>(i) * count + i] = 1.0;
  return ResponseFunction(count, count, std::move(t));
}

Povm apply_noise(const Povm& p, double eta) {
  const int d = p.dim();
  std::vector<HermitianOperator> noisy;
  noisy.reserve(p.outcome_count());
  for (const auto& e : p.effects()) {
    noisy.push_back(eta * e + ((1.0 - eta) * e.trace() / d) * HermitianOperator::identity(d));
  }
  return Povm(std::move(noisy), p.label());
}

Assemblage apply_noise(const Assemblage& a, const NoiseSpec& s) {
  if (s.size() != a.size())
    throw LengthMismatch("noise spec length " + std::to_string(s.size()) +
                         " does not match assemblage size " + std::to_string(a.size()));
  std::vector<Povm> out;
  out.reserve(a.size());
  for (int x = 0; x < a.size(); ++x) out.push_back(apply_noise(a.measurement(x), s.eta(x)));
  return Assemblage(std::move(out));
}

Povm bloch_measurement(const std::array<double, 3>& m, std::string label) {
  Tolerances tol;
  const double norm = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
  if (norm > 1.0 + tol.bloch_norm_slack)
    throw BlochNormExceeded("Bloch vector norm " + std::to_string(norm) + " exceeds 1");
  // (I + m.sigma)/2 = [[1 + mz, mx - i my], [mx + i my, 1 - mz]] / 2
  const Complex off(m[0], m[1]);
  std::vector<Complex> plus = {Complex(0.5 * (1.0 + m[2])), 0.5 * std::conj(off),
                               0.5 * off, Complex(0.5 * (1.0 - m[2]))};
  std::vector<Complex> minus = {Complex(0.5 * (1.0 - m[2])), -0.5 * std::conj(off),
                                -0.5 * off, Complex(0.5 * (1.0 + m[2]))};
  std::vector<HermitianOperator> effects = {HermitianOperator::from_entries(2, plus),
                                            HermitianOperator::from_entries(2, minus)};
  return Povm(std::move(effects), std::move(label));
}

Assemblage qubit_mub_trio() {
  return Assemblage({bloch_measurement({1.0, 0.0, 0.0}, "x"),
                     bloch_measurement({0.0, 1.0, 0.0}, "y"),
                     bloch_measurement({0.0, 0.0, 1.0}, "z")});
}

Povm coarse_grain(const Povm& p, const ResponseFunction& r) {
  if (r.input_count() != p.outcome_count())
    throw ShapeMismatch("response input count " + std::to_string(r.input_count()) +
                        " does not match outcome count " + std::to_string(p.outcome_count()));
  std::vector<HermitianOperator> out;
  out.reserve(r.output_count());
  for (int a = 0; a < r.output_count(); ++a) {
    HermitianOperator acc(p.dim());
    for (int b = 0; b < p.outcome_count(); ++b) acc += r.p(a, b) * p.effect(b);
    out.push_back(std::move(acc));
  }
  return Povm(std::move(out), p.label());
}

}  // namespace incompat
