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

/// POVMs, assemblages, the white-noise channel, and classical post-processing.
/// All values are immutable after construction and safe to share.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "incompat/linalg.hpp"

namespace incompat {

/// One measurement: an ordered list of effects on a d-dimensional system.
/// Construction enforces structure (equal dims, at least one effect); the
/// physical invariants (effects PSD, effects summing to identity) are checked
/// by validate() so that non-physical candidates can still be represented and
/// diagnosed.
class Povm {
 public:
  explicit Povm(std::vector<HermitianOperator> effects, std::string label = "");

  int dim() const { return dim_; }
  int outcome_count() const { return static_cast<int>(effects_.size()); }
  const HermitianOperator& effect(int a) const { return effects_.at(a); }
  const std::vector<HermitianOperator>& effects() const { return effects_; }
  const std::string& label() const { return label_; }

 private:
  int dim_;
  std::vector<HermitianOperator> effects_;
  std::string label_;
};

struct PovmViolation {
  std::string what;
  int effect_index;  ///< -1 when the violation is not tied to one effect
  double magnitude;
};

/// Empty report iff every effect is PSD (min eigenvalue >= -tol.effect_psd)
/// and the effects sum to the identity within tol.povm_sum elementwise.
std::vector<PovmViolation> validate(const Povm& p, const Tolerances& tol = {});

/// An ordered list of n >= 1 measurements sharing one dimension.
class Assemblage {
 public:
  explicit Assemblage(std::vector<Povm> measurements);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(measurements_.size()); }
  const Povm& measurement(int x) const { return measurements_.at(x); }
  const std::vector<Povm>& measurements() const { return measurements_; }

 private:
  int dim_;
  std::vector<Povm> measurements_;
};

/// Per-measurement visibility eta_x in [0, 1]; a constant list is uniform
/// noise.
class NoiseSpec {
 public:
  explicit NoiseSpec(std::vector<double> per_measurement);
  static NoiseSpec uniform(double eta, int n);

  int size() const { return static_cast<int>(eta_.size()); }
  double eta(int x) const { return eta_.at(x); }
  const std::vector<double>& values() const { return eta_; }

 private:
  std::vector<double> eta_;
};

/// Classical post-processing table p(a|b): entries >= 0 and column-stochastic
/// (sum_a p(a|b) = 1 for every b).
class ResponseFunction {
 public:
  ResponseFunction(int output_count, int input_count, std::vector<double> p_row_major,
                   const Tolerances& tol = {});
  static ResponseFunction identity(int count);

  int output_count() const { return outputs_; }
  int input_count() const { return inputs_; }
  double p(int a, int b) const { return table_.at(static_cast<size_t>(a) * inputs_ + b); }

 private:
  int outputs_;
  int inputs_;
  std::vector<double> table_;
};

/// Mixes each effect with white noise:
/// effect -> eta_x * effect + (1 - eta_x) * tr(effect) * I / d.
/// Preserves outcome counts, dimension, and effect traces.
/// Throws LengthMismatch when the spec length differs from the assemblage size.
Assemblage apply_noise(const Assemblage& a, const NoiseSpec& s);

/// Single-measurement version of the noise channel.
Povm apply_noise(const Povm& p, double eta);

/// Binary qubit measurement with effects (I +- m.sigma)/2; projective iff
/// ||m|| = 1. Throws BlochNormExceeded when ||m|| > 1 (plus slack).
Povm bloch_measurement(const std::array<double, 3>& m, std::string label = "");

/// The three projective qubit measurements along the Pauli axes
/// (1,0,0), (0,1,0), (0,0,1); any single-qubit trio of mutually unbiased
/// bases is unitarily equivalent to it.
Assemblage qubit_mub_trio();

/// Output effect a = sum_b p(a|b) * input effect b. Throws ShapeMismatch when
/// the table's input count differs from the POVM's outcome count.
Povm coarse_grain(const Povm& p, const ResponseFunction& r);

}  // namespace incompat
