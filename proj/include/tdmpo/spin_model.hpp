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

// Ising chain in a tilted field,
//   H(hx, hz) = sum_j X_j X_{j+1} + sum_j (hx X_j + hz Z_j),
// with open boundaries, its bond decomposition and the second-order
// even/odd splitting used for time evolution.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <type_traits>
#include <vector>

#include "tdmpo/gate.hpp"
#include "tdmpo/linalg.hpp"

namespace tdmpo {

struct ModelParams {
  Index n = 2;
  double hx = 0.0;
  double hz = 0.0;

  void validate() const;
};

/// Transverse-field (free-fermion) point H(0, 2).
inline ModelParams integrable_model(Index n) { return {n, 0.0, 2.0}; }
/// Tilted-field point H(1, 1).
inline ModelParams chaotic_model(Index n) { return {n, 1.0, 1.0}; }

struct BondHamiltonian {
  Index bond = 0;
  Eigen::Matrix4cd h;
};

struct TrotterScheme {
  std::vector<GateLayer> layers;  // half even, full odd, half even
  double dt = 0.0;
  TimeKind kind = TimeKind::Real;
};

/// h_j = XX + w_l (hx X + hz Z) x 1 + 1 x w_r (hx X + hz Z). Interior sites
/// give half their field to each neighbouring bond; the end sites give all of
/// it to their only bond.
std::vector<BondHamiltonian> bond_terms(const ModelParams& params);

/// r_pq = 1/4 tr(sigma^p k^dagger sigma^q k) over two-site Pauli strings.
/// Real kind requires unitary k, imaginary kind Hermitian positive-definite k.
AdjointGate adjoint_gate(const Eigen::Matrix4cd& k, TimeKind kind, Index bond = 0);

/// One symmetric step: even bonds for tau = dt/2, odd bonds for dt, even
/// bonds for dt/2. Real time uses U = exp(-i h tau); imaginary time uses
/// K = exp(-h tau / 2) applied from both sides.
TrotterScheme trotter_step(const ModelParams& params, double dt, TimeKind kind);

/// Even bonds (0,1),(2,3),... sweep right-to-left; odd bonds left-to-right.
Sweep layer_sweep(Index bond_parity);

/// Human-readable record of the splitting conventions, for run metadata.
std::string splitting_conventions();

/// Largest chain for which dense Hamiltonians are built.
inline constexpr Index kMaxDenseHamiltonianSites = 14;

namespace detail {
Eigen::MatrixXd dense_hamiltonian_real(const ModelParams& params);
}

/// 2^n x 2^n matrix of H(hx, hz); site 0 is the most significant qubit.
template <typename Scalar = cplx>
Matrix<Scalar> dense_hamiltonian(const ModelParams& params) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return detail::dense_hamiltonian_real(params);
  } else {
    return detail::dense_hamiltonian_real(params).template cast<Scalar>();
  }
}

/// 1^{x bond} x op x 1^{x (n - bond - 2)}.
Matrix<cplx> embed_two_site(const Eigen::Matrix4cd& op, Index bond, Index n);
/// 1^{x site} x op x 1^{x (n - site - 1)}.
Matrix<cplx> embed_one_site(const Eigen::Matrix2cd& op, Index site, Index n);

}  // namespace tdmpo
