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

/// Dense complex linear algebra for small Hermitian matrices (dim <= 8 in
/// practice). Everything is value-typed and immutable after construction, so
/// instances may be shared freely across threads.

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "incompat/config.hpp"
#include "incompat/errors.hpp"

namespace incompat {

using Complex = std::complex<double>;

/// General dense complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(int rows, int cols);
  static ComplexMatrix identity(int d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Complex& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  const Complex& operator()(int i, int j) const {
    return data_[static_cast<size_t>(i) * cols_ + j];
  }

  ComplexMatrix adjoint() const;
  double frobenius_norm() const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex scale);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex scale, ComplexMatrix a);

/// d x d complex Hermitian matrix. Construction symmetrizes (M + M^dag)/2 when
/// the hermiticity defect is below the configured tolerance and rejects the
/// input otherwise, so a held instance is always exactly Hermitian.
class HermitianOperator {
 public:
  /// Zero matrix of the given dimension (dim >= 1).
  explicit HermitianOperator(int dim);

  static HermitianOperator identity(int dim);

  /// Builds from row-major entries. Throws NonHermitianInput when
  /// max_ij |M_ij - conj(M_ji)| exceeds tol.hermiticity_defect or any entry
  /// is not finite.
  static HermitianOperator from_entries(int dim, const std::vector<Complex>& row_major,
                                        const Tolerances& tol = {});

  /// Same as from_entries but taking a square ComplexMatrix.
  static HermitianOperator from_matrix(const ComplexMatrix& m, const Tolerances& tol = {});

  int dim() const { return dim_; }
  Complex operator()(int i, int j) const {
    return entries_[static_cast<size_t>(i) * dim_ + j];
  }

  double trace() const;
  double frobenius_norm() const;
  ComplexMatrix to_matrix() const;

  // Hermitian matrices are closed under real-linear combinations.
  HermitianOperator& operator+=(const HermitianOperator& rhs);
  HermitianOperator& operator-=(const HermitianOperator& rhs);
  HermitianOperator& operator*=(double scale);

  bool operator==(const HermitianOperator& rhs) const = default;

 private:
  HermitianOperator(int dim, std::vector<Complex> entries)
      : dim_(dim), entries_(std::move(entries)) {}

  int dim_;
  std::vector<Complex> entries_;
};

HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b);
HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b);
HermitianOperator operator*(double scale, HermitianOperator a);

/// M = vectors * diag(values) * vectors^dag, eigenvalues ascending,
/// eigenvectors as columns.
struct EigenDecomposition {
  std::vector<double> values;
  ComplexMatrix vectors;
};

/// All eigenvalues in ascending order (cyclic complex Jacobi).
std::vector<double> hermitian_eigenvalues(const HermitianOperator& m, const Tolerances& tol = {});

EigenDecomposition hermitian_eigendecomposition(const HermitianOperator& m,
                                                const Tolerances& tol = {});

/// Smallest eigenvalue; equals hermitian_eigenvalues(m).front().
double min_eigenvalue(const HermitianOperator& m, const Tolerances& tol = {});

/// Re tr(A B) for Hermitian A, B of equal dimension (the trace is real).
/// Throws DimensionMismatch.
double frobenius_inner(const HermitianOperator& a, const HermitianOperator& b);

/// U M U^dag for unitary U. Throws NonUnitary when |U^dag U - I| exceeds
/// tol.unitarity_defect entrywise.
HermitianOperator conjugate_by_unitary(const HermitianOperator& m, const ComplexMatrix& u,
                                       const Tolerances& tol = {});

// --- Factorizations used by the optimization layer ---

/// Lower-triangular L with M = L L^dag, or nullopt when M is not positive
/// definite (to working precision).
std::optional<ComplexMatrix> cholesky_factor(const HermitianOperator& m);

/// Solves L X = B for lower-triangular L.
ComplexMatrix solve_lower_triangular(const ComplexMatrix& l, const ComplexMatrix& b);

/// A = u * diag(sigma) * v^dag for square A (one-sided Jacobi; sigma >= 0,
/// unsorted).
struct SingularDecomposition {
  ComplexMatrix u;
  std::vector<double> sigma;
  ComplexMatrix v;
};

SingularDecomposition jacobi_svd(const ComplexMatrix& a);

}  // namespace incompat
