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

#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

namespace weakmeas {

using Complex = std::complex<double>;

// Tolerances shared by every validating constructor.
inline constexpr double kValidationTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;

// Dense complex square matrix of dimension 1..4, row-major.
//
// Every constructor rejects non-finite entries. The storage never touches the
// heap (fixed maximum size of 4x4).
class CMatrix {
 public:
  using Storage = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                Eigen::RowMajor, 4, 4>;

  static constexpr int kMaxDim = 4;

  // Zero matrix.
  explicit CMatrix(int dim);
  // Row-major entries; size must equal dim*dim.
  CMatrix(int dim, std::initializer_list<Complex> entries);
  CMatrix(int dim, const std::vector<Complex>& entries);
  explicit CMatrix(Storage m);

  static CMatrix identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  Complex operator()(int row, int col) const { return m_(row, col); }
  const Storage& storage() const { return m_; }

  Complex trace() const { return m_.trace(); }
  // Largest absolute entrywise difference.
  double max_abs_diff(const CMatrix& other) const;
  bool is_hermitian(double tol = kValidationTol) const;

  CMatrix operator+(const CMatrix& other) const;
  CMatrix operator-(const CMatrix& other) const;
  CMatrix operator*(Complex s) const;

 private:
  Storage m_;
};

CMatrix matmul(const CMatrix& a, const CMatrix& b);
CMatrix adjoint(const CMatrix& a);
// Left factor indexes the slower subsystem (nucleus in this code base).
CMatrix kron(const CMatrix& a, const CMatrix& b);

enum class Subsystem { nucleus, electron };

// Traces out `traced` from a 4x4 operator on nucleus (x) electron.
CMatrix partial_trace(const CMatrix& a, Subsystem traced);
// Transposes the `transposed` factor of a 4x4 operator.
CMatrix partial_transpose(const CMatrix& a, Subsystem transposed);

// Ascending eigenvalues of a Hermitian matrix (closed form for dim 2).
std::vector<double> hermitian_eigenvalues(const CMatrix& a);

// Hermitian, unit-trace, positive semidefinite CMatrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix mat);

  const CMatrix& mat() const { return mat_; }
  int dim() const { return mat_.dim(); }
  Complex operator()(int row, int col) const { return mat_(row, col); }

  // Pure state |psi><psi| from a (not necessarily normalized) vector.
  static DensityMatrix from_pure(const std::vector<Complex>& amplitudes);
  // Rescales a non-zero positive operator to unit trace.
  static DensityMatrix normalized(const CMatrix& unnormalized);

 private:
  CMatrix mat_;
};

double purity(const DensityMatrix& rho);

}  // namespace weakmeas
