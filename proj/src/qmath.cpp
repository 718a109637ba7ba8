/* Copyright 2026 The weakmeas Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "weakmeas/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace weakmeas {

namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > CMatrix::kMaxDim) {
    throw std::invalid_argument("CMatrix: dimension " + std::to_string(dim) +
                                " outside 1..4");
  }
}

void check_finite(const CMatrix::Storage& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
      throw std::invalid_argument("CMatrix: non-finite entry");
    }
  }
}

void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch " +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()));
  }
}

void require_dim4(const CMatrix& a, const char* what) {
  if (a.dim() != 4) {
    throw std::invalid_argument(std::string(what) +
                                ": expected a 4x4 nucleus-electron operator");
  }
}

}  // namespace

CMatrix::CMatrix(int dim) {
  check_dim(dim);
  m_ = Storage::Zero(dim, dim);
}

CMatrix::CMatrix(int dim, std::initializer_list<Complex> entries)
    : CMatrix(dim, std::vector<Complex>(entries)) {}

CMatrix::CMatrix(int dim, const std::vector<Complex>& entries) {
  check_dim(dim);
  if (entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw std::invalid_argument("CMatrix: expected " +
                                std::to_string(dim * dim) + " entries, got " +
                                std::to_string(entries.size()));
  }
  m_.resize(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) m_(r, c) = entries[r * dim + c];
  }
  check_finite(m_);
}

CMatrix::CMatrix(Storage m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("CMatrix: not square");
  check_dim(static_cast<int>(m_.rows()));
  check_finite(m_);
}

CMatrix CMatrix::identity(int dim) {
  check_dim(dim);
  return CMatrix(Storage(Storage::Identity(dim, dim)));
}

double CMatrix::max_abs_diff(const CMatrix& other) const {
  require_same_dim(*this, other, "max_abs_diff");
  return (m_ - other.m_).cwiseAbs().maxCoeff();
}

bool CMatrix::is_hermitian(double tol) const {
  // Squared moduli avoid a hypot per entry.
  return (m_ - m_.adjoint()).cwiseAbs2().maxCoeff() <= tol * tol;
}

CMatrix CMatrix::operator+(const CMatrix& other) const {
  require_same_dim(*this, other, "operator+");
  return CMatrix(Storage(m_ + other.m_));
}

CMatrix CMatrix::operator-(const CMatrix& other) const {
  require_same_dim(*this, other, "operator-");
  return CMatrix(Storage(m_ - other.m_));
}

CMatrix CMatrix::operator*(Complex s) const { return CMatrix(Storage(m_ * s)); }

CMatrix matmul(const CMatrix& a, const CMatrix& b) {
  require_same_dim(a, b, "matmul");
  return CMatrix(CMatrix::Storage(a.storage() * b.storage()));
}

CMatrix adjoint(const CMatrix& a) {
  return CMatrix(CMatrix::Storage(a.storage().adjoint()));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const int da = a.dim();
  const int db = b.dim();
  if (da * db > CMatrix::kMaxDim) {
    throw std::invalid_argument("kron: product dimension exceeds 4");
  }
  CMatrix::Storage out(da * db, da * db);
  for (int i = 0; i < da; ++i) {
    for (int j = 0; j < da; ++j) {
      out.block(i * db, j * db, db, db) = a(i, j) * b.storage();
    }
  }
  return CMatrix(std::move(out));
}

CMatrix partial_trace(const CMatrix& a, Subsystem traced) {
  require_dim4(a, "partial_trace");
  CMatrix::Storage out = CMatrix::Storage::Zero(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        if (traced == Subsystem::electron) {
          out(i, j) += a(2 * i + k, 2 * j + k);
        } else {
          out(i, j) += a(2 * k + i, 2 * k + j);
        }
      }
    }
  }
  return CMatrix(std::move(out));
}

CMatrix partial_transpose(const CMatrix& a, Subsystem transposed) {
  require_dim4(a, "partial_transpose");
  CMatrix::Storage out(4, 4);
  for (int n1 = 0; n1 < 2; ++n1) {
    for (int e1 = 0; e1 < 2; ++e1) {
      for (int n2 = 0; n2 < 2; ++n2) {
        for (int e2 = 0; e2 < 2; ++e2) {
          const int row = 2 * n1 + e1;
          const int col = 2 * n2 + e2;
          out(row, col) = transposed == Subsystem::electron
                              ? a(2 * n1 + e2, 2 * n2 + e1)
                              : a(2 * n2 + e1, 2 * n1 + e2);
        }
      }
    }
  }
  return CMatrix(std::move(out));
}

std::vector<double> hermitian_eigenvalues(const CMatrix& a) {
  if (!a.is_hermitian()) {
    throw std::invalid_argument("hermitian_eigenvalues: input not Hermitian");
  }
  const int dim = a.dim();
  if (dim == 1) return {a(0, 0).real()};
  if (dim == 2) {
    const double p = a(0, 0).real();
    const double q = a(1, 1).real();
    const double mean = 0.5 * (p + q);
    const double radius = std::hypot(0.5 * (p - q), std::abs(a(0, 1)));
    return {mean - radius, mean + radius};
  }
  Eigen::SelfAdjointEigenSolver<CMatrix::Storage> solver(
      a.storage(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("hermitian_eigenvalues: no convergence");
  }
  const auto& values = solver.eigenvalues();
  std::vector<double> out(values.data(), values.data() + values.size());
  std::sort(out.begin(), out.end());
  return out;
}

DensityMatrix::DensityMatrix(CMatrix mat) : mat_(std::move(mat)) {
  if (!mat_.is_hermitian(kValidationTol)) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  if (std::norm(mat_.trace() - 1.0) > kValidationTol * kValidationTol) {
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  }
  // rho + tol*I admits a Cholesky factor iff the smallest eigenvalue of rho
  // exceeds -tol.
  const CMatrix::Storage shifted =
      mat_.storage() + kPsdTol * CMatrix::Storage::Identity(dim(), dim());
  if (Eigen::LLT<CMatrix::Storage>(shifted).info() != Eigen::Success) {
    throw std::invalid_argument("DensityMatrix: not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::from_pure(const std::vector<Complex>& amplitudes) {
  const int dim = static_cast<int>(amplitudes.size());
  double norm2 = 0.0;
  for (const Complex& z : amplitudes) norm2 += std::norm(z);
  if (!(norm2 > 0.0)) throw std::invalid_argument("from_pure: zero vector");
  std::vector<Complex> entries(static_cast<std::size_t>(dim * dim));
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      entries[r * dim + c] = amplitudes[r] * std::conj(amplitudes[c]) / norm2;
    }
  }
  return DensityMatrix(CMatrix(dim, entries));
}

DensityMatrix DensityMatrix::normalized(const CMatrix& unnormalized) {
  const double tr = unnormalized.trace().real();
  if (!(tr > 0.0)) throw std::invalid_argument("normalized: non-positive trace");
  // Hermitize to remove rounding asymmetry before validation.
  const CMatrix::Storage& m = unnormalized.storage();
  return DensityMatrix(CMatrix(CMatrix::Storage((0.5 / tr) * (m + m.adjoint()))));
}

double purity(const DensityMatrix& rho) {
  return matmul(rho.mat(), rho.mat()).trace().real();
}

}  // namespace weakmeas
