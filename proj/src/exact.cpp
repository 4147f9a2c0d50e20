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

#include "tdmpo/exact.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace tdmpo {

namespace {

// V^T A V for real V and complex A, as four real products.
Matrix<cplx> real_congruence(const Eigen::MatrixXd& v, const Matrix<cplx>& a, bool transpose_first) {
  const Eigen::MatrixXd re = a.real();
  const Eigen::MatrixXd im = a.imag();
  Eigen::MatrixXd out_re, out_im;
  if (transpose_first) {
    out_re.noalias() = v.transpose() * re * v;
    out_im.noalias() = v.transpose() * im * v;
  } else {
    out_re.noalias() = v * re * v.transpose();
    out_im.noalias() = v * im * v.transpose();
  }
  Matrix<cplx> out(out_re.rows(), out_re.cols());
  out.real() = out_re;
  out.imag() = out_im;
  return out;
}

}  // namespace

ExactEvolver::ExactEvolver(const Matrix<cplx>& h) {
  require_hermitian(h, "ExactEvolver");
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    auto eig = eigh(Eigen::MatrixXd(h.real()));
    energies_ = std::move(eig.eigenvalues);
    vr_ = std::move(eig.eigenvectors);
    real_basis_ = true;
  } else {
    auto eig = eigh(h);
    energies_ = std::move(eig.eigenvalues);
    vc_ = std::move(eig.eigenvectors);
  }
}

Matrix<cplx> ExactEvolver::to_eigenbasis(const Matrix<cplx>& op) const {
  if (op.rows() != dim() || op.cols() != dim()) throw PreconditionError("ExactEvolver: dimension mismatch");
  if (real_basis_) return real_congruence(vr_, op, true);
  return vc_.adjoint() * op * vc_;
}

Matrix<cplx> ExactEvolver::from_eigenbasis(const Matrix<cplx>& op) const {
  if (op.rows() != dim() || op.cols() != dim()) throw PreconditionError("ExactEvolver: dimension mismatch");
  if (real_basis_) return real_congruence(vr_, op, false);
  return vc_ * op * vc_.adjoint();
}

Matrix<cplx> ExactEvolver::evolve_eigenbasis(const Matrix<cplx>& op_eig, double t) const {
  const Eigen::VectorXcd phase = (cplx(0.0, t) * energies_.cast<cplx>()).array().exp();
  // (e^{iEt} O e^{-iEt})_{ab} = e^{i(E_a - E_b)t} O_ab
  return phase.asDiagonal() * op_eig * phase.conjugate().asDiagonal();
}

Matrix<cplx> ExactEvolver::evolve(const Matrix<cplx>& op, double t) const {
  if (t == 0.0) return op;
  return from_eigenbasis(evolve_eigenbasis(to_eigenbasis(op), t));
}

Matrix<cplx> evolve_exact(const Matrix<cplx>& o0, const Matrix<cplx>& h, double t) {
  if (o0.rows() != h.rows() || o0.cols() != h.cols()) {
    throw PreconditionError("evolve_exact: operator and Hamiltonian dimensions differ");
  }
  return ExactEvolver(h).evolve(o0, t);
}

double fidelity(const Matrix<cplx>& a, const Matrix<cplx>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw PreconditionError("fidelity: shape mismatch");
  const double na = a.squaredNorm();
  const double nb = b.squaredNorm();
  if (!(na > 0.0) || !(nb > 0.0)) throw PreconditionError("fidelity: zero-norm operator");
  const cplx overlap = (a.conjugate().cwiseProduct(b)).sum();  // tr(a^dagger b)
  return std::norm(overlap) / (na * nb);
}

double fidelity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw PreconditionError("fidelity: size mismatch");
  const double na = a.squaredNorm();
  const double nb = b.squaredNorm();
  if (!(na > 0.0) || !(nb > 0.0)) throw PreconditionError("fidelity: zero-norm operator");
  const double overlap = a.dot(b);
  return overlap * overlap / (na * nb);
}

void conjugate_two_site(Matrix<cplx>& op, const Eigen::Matrix4cd& u, Index bond, Index n) {
  const Index dim = Index{1} << n;
  if (op.rows() != dim || op.cols() != dim) throw PreconditionError("conjugate_two_site: dimension mismatch");
  if (bond < 0 || bond + 1 >= n) throw PreconditionError("conjugate_two_site: bond out of range");
  const Index hi = Index{1} << (n - 1 - bond);
  const Index lo = Index{1} << (n - 2 - bond);
  const Eigen::Matrix4cd ud = u.adjoint();
  std::array<Index, 4> idx{};
  Eigen::Matrix<cplx, 4, Eigen::Dynamic> rows(4, dim);
  Eigen::Matrix<cplx, Eigen::Dynamic, 4> cols(dim, 4);
  for (Index base = 0; base < dim; ++base) {
    if ((base & hi) || (base & lo)) continue;
    idx = {base, base | lo, base | hi, base | hi | lo};
    for (int a = 0; a < 4; ++a) rows.row(a) = op.row(idx[static_cast<std::size_t>(a)]);
    rows = (ud * rows).eval();
    for (int a = 0; a < 4; ++a) op.row(idx[static_cast<std::size_t>(a)]) = rows.row(a);
  }
  for (Index base = 0; base < dim; ++base) {
    if ((base & hi) || (base & lo)) continue;
    idx = {base, base | lo, base | hi, base | hi | lo};
    for (int a = 0; a < 4; ++a) cols.col(a) = op.col(idx[static_cast<std::size_t>(a)]);
    cols = (cols * u).eval();
    for (int a = 0; a < 4; ++a) op.col(idx[static_cast<std::size_t>(a)]) = cols.col(a);
  }
}

DenseTrotterCircuit::DenseTrotterCircuit(const ModelParams& params, double dt)
    : n_(params.n), dt_(dt) {
  if (!(dt > 0.0)) throw PreconditionError("DenseTrotterCircuit: dt must be > 0");
  const auto terms = bond_terms(params);
  auto add_layer = [&](Index parity, double tau) {
    for (const auto& t : terms) {
      if (t.bond % 2 == parity) gates_.push_back({t.bond, expm_hermitian(t.h, cplx(0.0, -tau))});
    }
  };
  add_layer(0, 0.5 * dt);
  add_layer(1, dt);
  add_layer(0, 0.5 * dt);
}

void DenseTrotterCircuit::step(Matrix<cplx>& op) const {
  for (const auto& g : gates_) conjugate_two_site(op, g.u, g.bond, n_);
}

Matrix<cplx> DenseTrotterCircuit::unitary() const {
  const Index dim = Index{1} << n_;
  Matrix<cplx> u = Matrix<cplx>::Identity(dim, dim);
  // U = G_1 G_2 ... G_m where G_1 acts first on the operator, i.e. last on states.
  for (const auto& g : gates_) u = u * embed_two_site(g.u, g.bond, n_);
  return u;
}

Matrix<cplx> dense_imaginary_trotter(const ModelParams& params, double beta, double dbeta) {
  if (beta < 0.0 || !(dbeta > 0.0)) throw PreconditionError("dense_imaginary_trotter: need beta >= 0, dbeta > 0");
  const auto steps = static_cast<Index>(std::llround(beta / dbeta));
  if (std::abs(beta / dbeta - static_cast<double>(steps)) > 1e-9 * std::max(1.0, beta / dbeta)) {
    throw PreconditionError("dense_imaginary_trotter: dbeta must divide beta");
  }
  const auto terms = bond_terms(params);
  std::vector<std::pair<Index, Eigen::Matrix4cd>> gates;
  auto add_layer = [&](Index parity, double tau) {
    for (const auto& t : terms) {
      if (t.bond % 2 == parity) gates.emplace_back(t.bond, expm_hermitian(t.h, cplx(-0.5 * tau, 0.0)));
    }
  };
  add_layer(0, 0.5 * dbeta);
  add_layer(1, dbeta);
  add_layer(0, 0.5 * dbeta);
  const Index dim = Index{1} << params.n;
  Matrix<cplx> rho = Matrix<cplx>::Identity(dim, dim);
  for (Index s = 0; s < steps; ++s) {
    for (const auto& [bond, k] : gates) conjugate_two_site(rho, k, bond, params.n);
  }
  return rho;
}

}  // namespace tdmpo
