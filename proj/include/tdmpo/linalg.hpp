// Copyright 2026 The tdmpo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense kernels shared by every module. All functions accept any Eigen
// expression and are templated on its scalar type (double or
// std::complex<double>).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <limits>
#include <sstream>
#include <string>

#include "tdmpo/errors.hpp"

namespace tdmpo {

using Index = Eigen::Index;
using cplx = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
struct SvdResult {
  Matrix<Scalar> u;                 // rows x k, orthonormal columns
  Eigen::VectorXd singular_values;  // k = min(rows, cols), descending
  Matrix<Scalar> vdag;              // k x cols, orthonormal rows
};

template <typename Scalar>
struct EigResult {
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix<Scalar> eigenvectors;  // columns
};

namespace detail {

inline std::string shape_string(Index rows, Index cols) {
  std::ostringstream os;
  os << rows << "x" << cols;
  return os.str();
}

}  // namespace detail

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw PreconditionError(std::string(what) + ": matrix " +
                            detail::shape_string(m.rows(), m.cols()) +
                            " has non-finite entries");
  }
}

/// Largest entry of |h - h^dagger|.
template <typename Derived>
double hermitian_defect(const Eigen::MatrixBase<Derived>& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& h, const char* what,
                       double rel_tol = 1e-12) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw PreconditionError(std::string(what) + ": expected a nonempty square matrix, got " +
                            detail::shape_string(h.rows(), h.cols()));
  }
  require_finite(h, what);
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double defect = hermitian_defect(h);
  if (defect > rel_tol * scale) {
    std::ostringstream os;
    os << what << ": matrix is not Hermitian (max asymmetry " << defect << ")";
    throw PreconditionError(os.str());
  }
}

/// Thin SVD, singular values descending. Deterministic for a fixed input.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0 || m.cols() == 0) {
    throw PreconditionError("svd: empty matrix");
  }
  require_finite(m, "svd");
  Eigen::BDCSVD<Matrix<Scalar>> dec(m.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw NumericalError("svd: no convergence for " +
                         detail::shape_string(m.rows(), m.cols()) + " input");
  }
  return {dec.matrixU(), dec.singularValues(), dec.matrixV().adjoint()};
}

template <typename Derived>
EigResult<typename Derived::Scalar> eigh(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  require_hermitian(h, "eigh");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(h.eval(), Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigh: no convergence for " + detail::shape_string(h.rows(), h.cols()) +
                         " input");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Eigenvalues only; several times cheaper than eigh for large matrices.
template <typename Derived>
Eigen::VectorXd eigvalsh(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  require_hermitian(h, "eigvalsh");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(h.eval(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigvalsh: no convergence for " +
                         detail::shape_string(h.rows(), h.cols()) + " input");
  }
  return es.eigenvalues();
}

/// exp(z h) for Hermitian h, computed through its eigendecomposition.
template <typename Derived>
Matrix<cplx> expm_hermitian(const Eigen::MatrixBase<Derived>& h, cplx z) {
  const auto eig = eigh(h);
  const Eigen::VectorXcd phases = (z * eig.eigenvalues.template cast<cplx>()).array().exp();
  const Matrix<cplx> v = eig.eigenvectors.template cast<cplx>();
  return v * phases.asDiagonal() * v.adjoint();
}

template <typename DerivedA, typename DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                      typename DerivedB::Scalar>::ReturnType;
  if (a.size() == 0 || b.size() == 0) throw PreconditionError("kron: empty operand");
  Matrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          Scalar(a(i, j)) * b.template cast<Scalar>();
    }
  }
  return out;
}

}  // namespace tdmpo
