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

#include "tdmpo/spin_model.hpp"

#include <cmath>
#include <sstream>

#include "tdmpo/pauli.hpp"

namespace tdmpo {

void ModelParams::validate() const {
  if (n < 2) {
    std::ostringstream os;
    os << "model: n must be >= 2 (got " << n << ")";
    throw PreconditionError(os.str());
  }
  if (!std::isfinite(hx) || !std::isfinite(hz)) throw PreconditionError("model: fields must be finite");
}

std::vector<BondHamiltonian> bond_terms(const ModelParams& params) {
  params.validate();
  const Eigen::Matrix2cd x = pauli_matrix(Pauli::X);
  const Eigen::Matrix2cd z = pauli_matrix(Pauli::Z);
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  const Eigen::Matrix2cd field = params.hx * x + params.hz * z;
  const Eigen::Matrix4cd xx = kron(x, x);

  std::vector<BondHamiltonian> terms;
  for (Index j = 0; j + 1 < params.n; ++j) {
    const double wl = (j == 0) ? 1.0 : 0.5;
    const double wr = (j + 2 == params.n) ? 1.0 : 0.5;
    Eigen::Matrix4cd h = xx + wl * kron(field, id) + wr * kron(id, field);
    terms.push_back({j, h});
  }
  return terms;
}

AdjointGate adjoint_gate(const Eigen::Matrix4cd& k, TimeKind kind, Index bond) {
  require_finite(k, "adjoint_gate");
  if (kind == TimeKind::Real) {
    const double defect = (k.adjoint() * k - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
    if (defect > 1e-10) {
      std::ostringstream os;
      os << "adjoint_gate: real-time generator is not unitary (|k^dagger k - 1| = " << defect << ")";
      throw PreconditionError(os.str());
    }
  } else {
    require_hermitian(k, "adjoint_gate (imaginary time)", 1e-10);
    const double lo = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(k).eigenvalues().minCoeff();
    if (!(lo > 0.0)) {
      std::ostringstream os;
      os << "adjoint_gate: imaginary-time generator is not positive-definite (min eigenvalue " << lo
         << ")";
      throw PreconditionError(os.str());
    }
  }

  std::array<Eigen::Matrix4cd, 16> strings;
  for (int p = 0; p < 16; ++p) strings[static_cast<std::size_t>(p)] = pauli_pair_matrix(p);

  AdjointGate gate;
  gate.bond = bond;
  gate.kind = kind;
  const Eigen::Matrix4cd kd = k.adjoint();
  for (int q = 0; q < 16; ++q) {
    const Eigen::Matrix4cd image = kd * strings[static_cast<std::size_t>(q)] * k;
    for (int p = 0; p < 16; ++p) {
      // tr(sigma^p image) without forming the product.
      const cplx tr = (strings[static_cast<std::size_t>(p)].transpose().cwiseProduct(image)).sum();
      gate.r(p, q) = 0.25 * tr.real();
    }
  }
  return gate;
}

Sweep layer_sweep(Index bond_parity) {
  return (bond_parity % 2 == 0) ? Sweep::RightToLeft : Sweep::LeftToRight;
}

TrotterScheme trotter_step(const ModelParams& params, double dt, TimeKind kind) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw PreconditionError("trotter_step: dt must be > 0");
  const auto terms = bond_terms(params);

  auto make_layer = [&](Index parity, double tau) {
    GateLayer layer;
    layer.sweep = layer_sweep(parity);
    for (const auto& t : terms) {
      if (t.bond % 2 != parity) continue;
      Eigen::Matrix4cd k;
      if (kind == TimeKind::Real) {
        k = expm_hermitian(t.h, cplx(0.0, -tau));
      } else {
        k = expm_hermitian(t.h, cplx(-0.5 * tau, 0.0));
      }
      layer.gates.push_back(adjoint_gate(k, kind, t.bond));
    }
    return layer;
  };

  TrotterScheme scheme;
  scheme.dt = dt;
  scheme.kind = kind;
  scheme.layers.push_back(make_layer(0, 0.5 * dt));
  scheme.layers.push_back(make_layer(1, dt));
  scheme.layers.push_back(scheme.layers.front());
  return scheme;
}

std::string splitting_conventions() {
  return "bond field weights: 1/2 per adjacent bond for interior sites, 1 for end sites; "
         "H_e = bonds (0,1),(2,3),... swept right-to-left; H_o = bonds (1,2),(3,4),... swept "
         "left-to-right; step = e^{-i H_e dt/2} e^{-i H_o dt} e^{-i H_e dt/2}; imaginary time "
         "applies K = e^{-h tau/2} from both sides";
}

namespace detail {

Eigen::MatrixXd dense_hamiltonian_real(const ModelParams& params) {
  params.validate();
  if (params.n > kMaxDenseHamiltonianSites) {
    std::ostringstream os;
    os << "dense_hamiltonian: n = " << params.n << " exceeds the dense limit of "
       << kMaxDenseHamiltonianSites << " sites";
    throw CapacityError(os.str());
  }
  const Index n = params.n;
  const Index dim = Index{1} << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  auto mask = [n](Index site) { return Index{1} << (n - 1 - site); };
  for (Index i = 0; i < dim; ++i) {
    double diag = 0.0;
    for (Index j = 0; j < n; ++j) {
      diag += params.hz * (((i & mask(j)) != 0) ? -1.0 : 1.0);
      h(i ^ mask(j), i) += params.hx;
    }
    h(i, i) += diag;
    for (Index j = 0; j + 1 < n; ++j) h(i ^ mask(j) ^ mask(j + 1), i) += 1.0;
  }
  return h;
}

}  // namespace detail

Matrix<cplx> embed_two_site(const Eigen::Matrix4cd& op, Index bond, Index n) {
  if (bond < 0 || bond + 1 >= n) throw PreconditionError("embed_two_site: bond out of range");
  const Matrix<cplx> left = Matrix<cplx>::Identity(Index{1} << bond, Index{1} << bond);
  const Index rest = n - bond - 2;
  const Matrix<cplx> right = Matrix<cplx>::Identity(Index{1} << rest, Index{1} << rest);
  return kron(kron(left, op), right);
}

Matrix<cplx> embed_one_site(const Eigen::Matrix2cd& op, Index site, Index n) {
  if (site < 0 || site >= n) throw PreconditionError("embed_one_site: site out of range");
  const Matrix<cplx> left = Matrix<cplx>::Identity(Index{1} << site, Index{1} << site);
  const Index rest = n - site - 1;
  const Matrix<cplx> right = Matrix<cplx>::Identity(Index{1} << rest, Index{1} << rest);
  return kron(kron(left, op), right);
}

}  // namespace tdmpo
