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

#include "incompat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace incompat {

namespace {

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

ComplexMatrix::ComplexMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, Complex(0.0, 0.0)) {
  if (rows < 0 || cols < 0) throw BadRange("matrix dimensions must be nonnegative");
}

ComplexMatrix ComplexMatrix::identity(int d) {
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const Complex& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("matrix add shape");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionMismatch("matrix sub shape");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (Complex& z : data_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape");
  ComplexMatrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex(0.0, 0.0)) continue;
      for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(Complex scale, ComplexMatrix a) { return a *= scale; }

HermitianOperator::HermitianOperator(int dim)
    : dim_(dim), entries_(static_cast<size_t>(dim) * dim, Complex(0.0, 0.0)) {
  if (dim < 1) throw BadRange("Hermitian dimension must be >= 1");
}

HermitianOperator HermitianOperator::identity(int dim) {
  HermitianOperator m(dim);
  for (int i = 0; i < dim; ++i) m.entries_[static_cast<size_t>(i) * dim + i] = 1.0;
  return m;
}

HermitianOperator HermitianOperator::from_entries(int dim, const std::vector<Complex>& row_major,
                                                  const Tolerances& tol) {
  if (dim < 1) throw BadRange("Hermitian dimension must be >= 1");
  if (row_major.size() != static_cast<size_t>(dim) * dim)
    throw DimensionMismatch("entry count does not match dim*dim");
  double defect = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const Complex mij = row_major[static_cast<size_t>(i) * dim + j];
      if (!is_finite(mij)) throw NonHermitianInput("matrix entry is not finite");
      const Complex mji = row_major[static_cast<size_t>(j) * dim + i];
      defect = std::max(defect, std::abs(mij - std::conj(mji)));
    }
  }
  if (defect > tol.hermiticity_defect) {
    throw NonHermitianInput("hermiticity defect " + std::to_string(defect) + " exceeds " +
                            std::to_string(tol.hermiticity_defect));
  }
  std::vector<Complex> sym(row_major.size());
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const Complex mij = row_major[static_cast<size_t>(i) * dim + j];
      const Complex mji = row_major[static_cast<size_t>(j) * dim + i];
      sym[static_cast<size_t>(i) * dim + j] = 0.5 * (mij + std::conj(mji));
    }
  }
  // Pin the diagonal to be exactly real.
  for (int i = 0; i < dim; ++i)
    sym[static_cast<size_t>(i) * dim + i] = Complex(sym[static_cast<size_t>(i) * dim + i].real(), 0.0);
  return HermitianOperator(dim, std::move(sym));
}

HermitianOperator HermitianOperator::from_matrix(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols()) throw DimensionMismatch("Hermitian input must be square");
  std::vector<Complex> entries;
  entries.reserve(static_cast<size_t>(m.rows()) * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
  return from_entries(m.rows(), entries, tol);
}

double HermitianOperator::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i).real();
  return t;
}

double HermitianOperator::frobenius_norm() const {
  double s = 0.0;
  for (const Complex& z : entries_) s += std::norm(z);
  return std::sqrt(s);
}

ComplexMatrix HermitianOperator::to_matrix() const {
  ComplexMatrix m(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
  return m;
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& rhs) {
  if (dim_ != rhs.dim_) throw DimensionMismatch("Hermitian add shape");
  for (size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& rhs) {
  if (dim_ != rhs.dim_) throw DimensionMismatch("Hermitian sub shape");
  for (size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double scale) {
  for (Complex& z : entries_) z *= scale;
  return *this;
}

HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
HermitianOperator operator*(double scale, HermitianOperator a) { return a *= scale; }

namespace {

double off_diagonal_mass(const ComplexMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One cyclic Jacobi rotation zeroing a(p,q). Updates a in place and
// accumulates the rotation into v (columns).
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, int p, int q) {
  const Complex apq = a(p, q);
  const double abs_apq = std::abs(apq);
  if (abs_apq == 0.0) return;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  // Conjugate phase maps the pivot to a real symmetric 2x2 problem:
  // diag(1, phase)^dag A diag(1, phase) has real (p,q) entry.
  const Complex phase = std::conj(apq) / abs_apq;
  const double tau = (aqq - app) / (2.0 * abs_apq);
  const double t =
      (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                   : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const int d = a.rows();
  // Column update with G = [[c, s],[-s*phase, c*phase]] on columns (p,q).
  for (int k = 0; k < d; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = c * akp - s * phase * akq;
    a(k, q) = s * akp + c * phase * akq;
  }
  // Row update with G^dag on rows (p,q).
  for (int k = 0; k < d; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk - s * std::conj(phase) * aqk;
    a(q, k) = s * apk + c * std::conj(phase) * aqk;
  }
  // The pivot pair is now diagonal up to round-off; pin it.
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = Complex(a(p, p).real(), 0.0);
  a(q, q) = Complex(a(q, q).real(), 0.0);

  for (int k = 0; k < d; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp - s * phase * vkq;
    v(k, q) = s * vkp + c * phase * vkq;
  }
}

}  // namespace

EigenDecomposition hermitian_eigendecomposition(const HermitianOperator& m, const Tolerances& tol) {
  const int d = m.dim();
  ComplexMatrix a = m.to_matrix();
  ComplexMatrix v = ComplexMatrix::identity(d);
  const double stop = tol.eig_off_diagonal * std::max(1.0, m.frobenius_norm());

  for (int sweep = 0; sweep < tol.eig_max_sweeps; ++sweep) {
    if (off_diagonal_mass(a) <= stop) break;
    for (int p = 0; p < d - 1; ++p)
      for (int q = p + 1; q < d; ++q) jacobi_rotate(a, v, p, q);
  }

  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out;
  out.values.resize(d);
  out.vectors = ComplexMatrix(d, d);
  for (int j = 0; j < d; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (int i = 0; i < d; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const HermitianOperator& m, const Tolerances& tol) {
  return hermitian_eigendecomposition(m, tol).values;
}

double min_eigenvalue(const HermitianOperator& m, const Tolerances& tol) {
  return hermitian_eigenvalues(m, tol).front();
}

double frobenius_inner(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("frobenius_inner dims");
  // tr(AB) = sum_ij A_ij conj(B_ij) is real for Hermitian A, B.
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      s += a(i, j).real() * b(i, j).real() + a(i, j).imag() * b(i, j).imag();
  return s;
}

HermitianOperator conjugate_by_unitary(const HermitianOperator& m, const ComplexMatrix& u,
                                       const Tolerances& tol) {
  if (u.rows() != m.dim() || u.cols() != m.dim())
    throw DimensionMismatch("unitary shape does not match operator");
  const ComplexMatrix gram = u.adjoint() * u;
  double defect = 0.0;
  for (int i = 0; i < gram.rows(); ++i)
    for (int j = 0; j < gram.cols(); ++j)
      defect = std::max(defect, std::abs(gram(i, j) - (i == j ? Complex(1.0) : Complex(0.0))));
  if (defect > tol.unitarity_defect)
    throw NonUnitary("unitarity defect " + std::to_string(defect));
  ComplexMatrix conj = u * m.to_matrix() * u.adjoint();
  // Round-off can leave a sub-tolerance hermiticity defect; construction
  // symmetrizes it away.
  return HermitianOperator::from_matrix(conj, tol);
}

std::optional<ComplexMatrix> cholesky_factor(const HermitianOperator& m) {
  const int d = m.dim();
  ComplexMatrix l(d, d);
  for (int j = 0; j < d; ++j) {
    double diag = m(j, j).real();
    for (int k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0) || !std::isfinite(diag)) return std::nullopt;
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (int i = j + 1; i < d; ++i) {
      Complex s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

ComplexMatrix solve_lower_triangular(const ComplexMatrix& l, const ComplexMatrix& b) {
  if (l.rows() != l.cols() || l.rows() != b.rows())
    throw DimensionMismatch("triangular solve shape");
  ComplexMatrix x = b;
  const int d = l.rows();
  for (int col = 0; col < b.cols(); ++col) {
    for (int i = 0; i < d; ++i) {
      Complex s = x(i, col);
      for (int k = 0; k < i; ++k) s -= l(i, k) * x(k, col);
      x(i, col) = s / l(i, i);
    }
  }
  return x;
}

SingularDecomposition jacobi_svd(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("jacobi_svd expects a square matrix");
  const int d = a.rows();
  ComplexMatrix w = a;
  ComplexMatrix v = ComplexMatrix::identity(d);

  // One-sided Jacobi: orthogonalize column pairs from the right.
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma(0.0, 0.0);
        for (int k = 0; k < d; ++k) {
          alpha += std::norm(w(k, p));
          beta += std::norm(w(k, q));
          gamma += std::conj(w(k, p)) * w(k, q);
        }
        const double abs_g = std::abs(gamma);
        if (abs_g <= 1e-15 * std::sqrt(alpha * beta) || abs_g == 0.0) continue;
        rotated = true;
        const Complex phase = std::conj(gamma) / abs_g;
        const double tau = (beta - alpha) / (2.0 * abs_g);
        const double t =
            (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                         : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < d; ++k) {
          const Complex wkp = w(k, p);
          const Complex wkq = w(k, q);
          w(k, p) = c * wkp - s * phase * wkq;
          w(k, q) = s * wkp + c * phase * wkq;
        }
        for (int k = 0; k < d; ++k) {
          const Complex vkp = v(k, p);
          const Complex vkq = v(k, q);
          v(k, p) = c * vkp - s * phase * vkq;
          v(k, q) = s * vkp + c * phase * vkq;
        }
      }
    }
    if (!rotated) break;
  }

  SingularDecomposition out;
  out.sigma.resize(d);
  out.u = ComplexMatrix(d, d);
  out.v = v;
  for (int j = 0; j < d; ++j) {
    double norm = 0.0;
    for (int k = 0; k < d; ++k) norm += std::norm(w(k, j));
    norm = std::sqrt(norm);
    out.sigma[j] = norm;
    const double inv = norm > 0.0 ? 1.0 / norm : 0.0;
    for (int k = 0; k < d; ++k) out.u(k, j) = w(k, j) * inv;
  }
  return out;
}

}  // namespace incompat
