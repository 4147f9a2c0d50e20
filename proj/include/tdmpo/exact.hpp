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

// Dense reference dynamics for small chains.

#pragma once

#include <Eigen/Dense>

#include <vector>

#include "tdmpo/linalg.hpp"
#include "tdmpo/spin_model.hpp"

namespace tdmpo {

/// Heisenberg-picture evolution O(t) = e^{iHt} O e^{-iHt} through one
/// diagonalization of H, reused for every t.
class ExactEvolver {
 public:
  explicit ExactEvolver(const Matrix<cplx>& h);

  Index dim() const { return energies_.size(); }
  const Eigen::VectorXd& energies() const { return energies_; }

  Matrix<cplx> to_eigenbasis(const Matrix<cplx>& op) const;
  Matrix<cplx> from_eigenbasis(const Matrix<cplx>& op) const;
  /// Evolves an operator already expressed in the eigenbasis.
  Matrix<cplx> evolve_eigenbasis(const Matrix<cplx>& op_eig, double t) const;
  Matrix<cplx> evolve(const Matrix<cplx>& op, double t) const;

 private:
  Eigen::VectorXd energies_;
  bool real_basis_ = false;
  Eigen::MatrixXd vr_;   // used when H is real symmetric
  Matrix<cplx> vc_;      // otherwise
};

Matrix<cplx> evolve_exact(const Matrix<cplx>& o0, const Matrix<cplx>& h, double t);

/// |tr(a^dagger b)|^2 / (tr(a^dagger a) tr(b^dagger b)).
double fidelity(const Matrix<cplx>& a, const Matrix<cplx>& b);
/// Same quantity from real Pauli coefficient vectors.
double fidelity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// O <- U^dagger O U for a two-site U acting on (bond, bond + 1).
void conjugate_two_site(Matrix<cplx>& op, const Eigen::Matrix4cd& u, Index bond, Index n);

/// The same second-order splitting as trotter_step, applied to dense
/// operators gate by gate.
class DenseTrotterCircuit {
 public:
  DenseTrotterCircuit(const ModelParams& params, double dt);

  /// O <- U(dt)^dagger O U(dt).
  void step(Matrix<cplx>& op) const;
  /// Dense product of the embedded gate unitaries for one step.
  Matrix<cplx> unitary() const;
  double dt() const { return dt_; }

 private:
  struct Gate {
    Index bond;
    Eigen::Matrix4cd u;
  };
  Index n_;
  double dt_;
  std::vector<Gate> gates_;  // in time order
};

/// exp(-beta H) built from the two-sided imaginary-time splitting, starting
/// from the identity.
Matrix<cplx> dense_imaginary_trotter(const ModelParams& params, double beta, double dbeta);

}  // namespace tdmpo
