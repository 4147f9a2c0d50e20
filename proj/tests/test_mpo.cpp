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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "test_support.hpp"
#include "tdmpo/exact.hpp"
#include "tdmpo/mpo.hpp"
#include "tdmpo/spin_model.hpp"

namespace tdmpo {
namespace {

using testing::random_hermitian;
using testing::random_mpo;

const cplx kI(0.0, 1.0);

double max_abs(const Matrix<cplx>& m) { return m.cwiseAbs().maxCoeff(); }

Matrix<cplx> embed_string(Index n, const std::map<Index, Pauli>& letters) {
  Matrix<cplx> out = Matrix<cplx>::Identity(1, 1);
  for (Index j = 0; j < n; ++j) {
    const auto it = letters.find(j);
    out = kron(out, pauli_matrix(it == letters.end() ? Pauli::I : it->second));
  }
  return out;
}

Eigen::Matrix4cd random_unitary(unsigned seed) {
  const Matrix<cplx> h = random_hermitian(4, seed);
  return expm_hermitian(h, -kI * 0.7);
}

double dense_inner(const Matrix<cplx>& a, const Matrix<cplx>& b) {
  return (a.adjoint() * b).trace().real() / static_cast<double>(a.rows());
}

// --- construction -----------------------------------------------------------

TEST(MpoIdentity, DenseFormAndNormalization) {
  EXPECT_LT(max_abs(mpo_to_dense(mpo_identity(2)) - Matrix<cplx>::Identity(4, 4)), 1e-15);
  EXPECT_LT(max_abs(mpo_to_dense(mpo_identity(3)) - Matrix<cplx>::Identity(8, 8)), 1e-15);
  EXPECT_DOUBLE_EQ(hs_inner(mpo_identity(5), mpo_identity(5)), 1.0);
  const auto dense = mpo_to_dense(mpo_identity(6));
  EXPECT_NEAR(dense.trace().real() / 64.0, 1.0, 1e-15);
}

TEST(MpoPauliString, DenseForm) {
  const auto m = mpo_pauli_string(4, {{2, Pauli::Y}});
  EXPECT_LT(max_abs(mpo_to_dense(m) - embed_string(4, {{2, Pauli::Y}})), 1e-15);
  EXPECT_EQ(m.max_bond(), 1);
  const auto far = mpo_pauli_string(20, {{10, Pauli::Z}});
  EXPECT_EQ(far.size(), 20);
  EXPECT_DOUBLE_EQ(hs_norm2(far), 1.0);
}

TEST(MpoPauliString, DistinctStringsAreOrthogonal) {
  const auto a = mpo_pauli_string(5, {{1, Pauli::X}});
  const auto b = mpo_pauli_string(5, {{1, Pauli::Y}});
  const auto c = mpo_pauli_string(5, {{1, Pauli::X}, {3, Pauli::Z}});
  EXPECT_EQ(hs_inner(a, b), 0.0);
  EXPECT_EQ(hs_inner(a, c), 0.0);
  EXPECT_EQ(hs_inner(a, a), 1.0);
  EXPECT_EQ(hs_inner(mpo_identity(5), mpo_pauli_string(5, {{4, Pauli::Z}})), 0.0);
}

TEST(MpoPauliString, RejectsSitesOutsideChain) {
  EXPECT_THROW(mpo_pauli_string(4, {{4, Pauli::X}}), PreconditionError);
  EXPECT_THROW(mpo_pauli_string(0, {}), PreconditionError);
}

TEST(MpoExtensive, SumOfX) {
  const auto m = mpo_extensive(6, {{1.0, {{0, Pauli::X}}}});
  EXPECT_EQ(m.max_bond(), 2);
  Matrix<cplx> dense = Matrix<cplx>::Zero(64, 64);
  for (Index j = 0; j < 6; ++j) dense += embed_string(6, {{j, Pauli::X}});
  EXPECT_LT(max_abs(mpo_to_dense(m) - dense), 1e-13);

  const auto small = mpo_to_dense(mpo_extensive(3, {{1.0, {{0, Pauli::X}}}}));
  const Matrix<cplx> expected = embed_string(3, {{0, Pauli::X}}) + embed_string(3, {{1, Pauli::X}}) +
                                embed_string(3, {{2, Pauli::X}});
  EXPECT_LT(max_abs(small - expected), 1e-15);
}

TEST(MpoExtensive, HamiltonianAsOperator) {
  const auto m = mpo_extensive(6, {{1.0, {{0, Pauli::X}, {1, Pauli::X}}}, {1.0, {{0, Pauli::Z}}}});
  EXPECT_EQ(m.max_bond(), 3);
  EXPECT_LT(max_abs(mpo_to_dense(m) - dense_hamiltonian(ModelParams{6, 0.0, 1.0})), 1e-13);
}

TEST(MpoExtensive, ZzPlusYy) {
  const auto m = mpo_extensive(6, {{1.0, {{0, Pauli::Z}, {1, Pauli::Z}}}, {1.0, {{0, Pauli::Y}, {1, Pauli::Y}}}});
  Matrix<cplx> dense = Matrix<cplx>::Zero(64, 64);
  for (Index j = 0; j + 1 < 6; ++j) {
    dense += embed_string(6, {{j, Pauli::Z}, {j + 1, Pauli::Z}});
    dense += embed_string(6, {{j, Pauli::Y}, {j + 1, Pauli::Y}});
  }
  EXPECT_LT(max_abs(mpo_to_dense(m) - dense), 1e-13);
}

TEST(MpoExtensive, RejectsWidePatterns) {
  EXPECT_THROW(mpo_extensive(6, {{1.0, {{0, Pauli::X}, {2, Pauli::X}}}}), PreconditionError);
  EXPECT_THROW(mpo_extensive(6, {}), PreconditionError);
}

TEST(Mpo, RejectsInconsistentBonds) {
  std::vector<SiteTensor> sites{SiteTensor(1, 2), SiteTensor(3, 1)};
  EXPECT_THROW(Mpo{sites}, PreconditionError);
  std::vector<SiteTensor> open{SiteTensor(2, 1), SiteTensor(1, 1)};
  EXPECT_THROW(Mpo{open}, PreconditionError);
}

// --- dense bridges ----------------------------------------------------------

TEST(DenseBridge, RoundTripThroughExactMpo) {
  const auto h = random_hermitian(16, 21);
  const auto m = mpo_from_dense(h);
  EXPECT_LE(m.max_bond(), 16);
  EXPECT_LT(max_abs(mpo_to_dense(m) - h), 1e-12);
}

TEST(DenseBridge, PauliCoefficientsRoundTrip) {
  const auto h = random_hermitian(8, 4);
  const Eigen::VectorXcd c = pauli_from_dense(h);
  EXPECT_LT(c.imag().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(max_abs(dense_from_pauli(c, 3) - h), 1e-14);
  const auto m = mpo_from_dense(h);
  EXPECT_LT((pauli_coefficients(m) - c.real()).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(DenseBridge, RefusesLargeChains) {
  EXPECT_THROW(mpo_to_dense(mpo_identity(kMaxDenseSites + 1)), CapacityError);
}

TEST(HsInner, MatchesDenseTrace) {
  for (unsigned seed = 1; seed <= 3; ++seed) {
    const auto a = random_mpo(6, 8, seed);
    const auto b = random_mpo(6, 5, seed + 10);
    const double expected = dense_inner(mpo_to_dense(a), mpo_to_dense(b));
    EXPECT_NEAR(hs_inner(a, b), expected, 1e-11 * std::max(1.0, std::abs(expected)));
  }
}

TEST(HsInner, RejectsDifferentLengths) {
  EXPECT_THROW(hs_inner(mpo_identity(3), mpo_identity(4)), PreconditionError);
}

// --- gauge ------------------------------------------------------------------

TEST(Canonicalize, IdentityUnchanged) {
  for (Index c = 0; c < 4; ++c) {
    auto m = mpo_identity(4);
    canonicalize(m, c);
    EXPECT_LT(max_abs(mpo_to_dense(m) - Matrix<cplx>::Identity(16, 16)), 1e-14);
  }
}

TEST(Canonicalize, IsIdempotent) {
  auto a = random_mpo(6, 8, 3);
  canonicalize(a, 2);
  auto b = a;
  b.set_center(std::nullopt);
  canonicalize(b, 2);
  for (Index j = 0; j < 6; ++j) {
    const auto da = Eigen::Map<const Eigen::VectorXd>(a.site(j).data(), a.site(j).size());
    const auto db = Eigen::Map<const Eigen::VectorXd>(b.site(j).data(), b.site(j).size());
    EXPECT_LT((da - db).cwiseAbs().maxCoeff(), 1e-12) << "site " << j;
  }
}

TEST(Canonicalize, ProducesIsometries) {
  auto m = random_mpo(7, 10, 5);
  for (Index c : {0, 3, 6}) {
    canonicalize(m, c);
    EXPECT_EQ(m.center(), c);
    EXPECT_LT(gauge_defect(m), 1e-10);
  }
}

TEST(Canonicalize, GaugeInvariantInnerProduct) {
  const auto frozen = random_mpo(6, 8, 9);
  auto moving = random_mpo(6, 8, 12);
  const double reference = hs_inner(frozen, moving);
  for (Index c = 0; c < 6; ++c) {
    canonicalize(moving, c);
    EXPECT_NEAR(hs_inner(frozen, moving), reference, 1e-10 * std::abs(reference));
    move_center(moving, 5 - c);
    EXPECT_NEAR(hs_inner(moving, frozen), reference, 1e-10 * std::abs(reference));
  }
}

// --- gates ------------------------------------------------------------------

TEST(ApplyGate, IdentityGateIsExact) {
  auto m = random_mpo(5, 4, 2);
  const auto before = mpo_to_dense(m);
  const auto report = apply_gate(m, 2, GateMatrix::Identity(), GateOptions{16, false});
  EXPECT_EQ(report.eta, 0.0);
  EXPECT_LT(max_abs(mpo_to_dense(m) - before), 1e-12 * max_abs(before));
}

TEST(ApplyGate, MatchesDenseConjugation) {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    auto m = random_mpo(4, 16, seed);
    Matrix<cplx> dense = mpo_to_dense(m);
    const auto u = random_unitary(seed + 40);
    const Index bond = seed % 3;
    const auto gate = adjoint_gate(u, TimeKind::Real, bond);
    apply_gate(m, bond, gate.r, GateOptions{}, seed % 2 ? Sweep::LeftToRight : Sweep::RightToLeft);
    conjugate_two_site(dense, u, bond, 4);
    EXPECT_LT(max_abs(mpo_to_dense(m) - dense), 1e-12 * max_abs(dense)) << "seed " << seed;
  }
}

TEST(ApplyGate, TruncatesForcedSpectrum) {
  // O = sqrt(0.99) XX + sqrt(0.01) ZZ has normalized Schmidt weights {0.99, 0.01}.
  SiteTensor a(1, 2), b(2, 1);
  a(0, 1, 0) = std::sqrt(0.99);
  a(0, 3, 1) = std::sqrt(0.01);
  b(0, 1, 0) = 1.0;
  b(1, 3, 0) = 1.0;
  Mpo m({a, b});
  const auto report = apply_gate(m, 0, GateMatrix::Identity(), GateOptions{1, false});
  EXPECT_NEAR(report.eta, 0.01, 1e-14);
  EXPECT_EQ(report.kept, 1);
  ASSERT_EQ(report.discarded_weight_spectrum.size(), 1u);
  EXPECT_NEAR(report.discarded_weight_spectrum[0], 0.01, 1e-14);
  EXPECT_EQ(m.max_bond(), 1);
}

TEST(ApplyGate, NormDropsByOneMinusEta) {
  for (unsigned seed = 1; seed <= 4; ++seed) {
    auto m = random_mpo(6, 6, seed);
    const Index bond = 1 + seed % 3;
    canonicalize(m, bond);
    const double before = hs_norm2(m);
    const auto gate = adjoint_gate(random_unitary(seed), TimeKind::Real, bond);
    const auto report = apply_gate(m, bond, gate.r, GateOptions{3, false});
    EXPECT_GT(report.eta, 1e-6);
    EXPECT_NEAR(hs_norm2(m), (1.0 - report.eta) * before, 1e-10 * before);
  }
}

TEST(ApplyGate, RenormalizeKeepsNormAndTracksScale) {
  auto m = random_mpo(6, 6, 8);
  canonicalize(m, 2);
  const double before = hs_norm2(m);
  const auto gate = adjoint_gate(random_unitary(3), TimeKind::Real, 2);
  const auto report = apply_gate(m, 2, gate.r, GateOptions{3, true});
  EXPECT_GT(report.eta, 1e-6);
  // The scale lives in log_norm; the tensors themselves carry unit norm.
  EXPECT_NEAR(hs_norm2(m), (1.0 - report.eta) * before, 1e-10 * before);
  EXPECT_NEAR(m.log_norm(), 0.5 * std::log((1.0 - report.eta) * before), 1e-10);
  m.set_log_norm(0.0);
  EXPECT_NEAR(hs_norm2(m), 1.0, 1e-12);
}

TEST(ApplyGate, ExactWhenBondBudgetSuffices) {
  auto m = random_mpo(6, 5, 6);
  for (Index bond = 0; bond < 5; ++bond) {
    const auto gate = adjoint_gate(random_unitary(static_cast<unsigned>(bond) + 1), TimeKind::Real, bond);
    const auto report = apply_gate(m, bond, gate.r, GateOptions{4 * m.max_bond(), false});
    EXPECT_LE(report.eta, 1e-24);
  }
}

TEST(ApplyGate, BondsRespectBudget) {
  auto m = mpo_pauli_string(8, {{4, Pauli::Y}});
  const auto scheme = trotter_step(chaotic_model(8), 0.3, TimeKind::Real);
  for (int s = 0; s < 6; ++s) {
    for (const auto& layer : scheme.layers) apply_layer(m, layer, GateOptions{5, false});
  }
  EXPECT_LE(m.max_bond(), 5);
  for (Index d : m.bond_dims()) EXPECT_LE(d, 5);
  EXPECT_EQ(m.bond_dims().front(), 1);
  EXPECT_EQ(m.bond_dims().back(), 1);
}

TEST(ApplyGate, RejectsBadArguments) {
  auto m = mpo_identity(4);
  EXPECT_THROW(apply_gate(m, 3, GateMatrix::Identity(), GateOptions{}), PreconditionError);
  EXPECT_THROW(apply_gate(m, -1, GateMatrix::Identity(), GateOptions{}), PreconditionError);
  EXPECT_THROW(apply_gate(m, 0, GateMatrix::Identity(), GateOptions{0, false}), PreconditionError);
  GateMatrix bad = GateMatrix::Identity();
  bad(0, 0) = std::nan("");
  EXPECT_THROW(apply_gate(m, 0, bad, GateOptions{}), PreconditionError);
}

TEST(ApplyGate, SingleGateErrorScalesWithSquaredStep) {
  // Fixed state, fixed budget: the discarded weight is second order in the
  // generator's strength.
  const auto h = bond_terms(chaotic_model(6))[2].h;
  auto base = random_mpo(6, 4, 17);
  canonicalize(base, 2);
  auto eta_for = [&](double dt) {
    auto m = base;
    const auto gate = adjoint_gate(expm_hermitian(Matrix<cplx>(h), -kI * dt), TimeKind::Real, 2);
    return apply_gate(m, 2, gate.r, GateOptions{4, false}).eta;
  };
  const double ratio = eta_for(0.02) / eta_for(0.01);
  EXPECT_NEAR(ratio, 4.0, 0.2);
}

TEST(ApplyLayer, IdentityGatesChangeNothing) {
  auto m = random_mpo(6, 4, 1);
  const auto before = mpo_to_dense(m);
  GateLayer layer{Sweep::LeftToRight, {}};
  for (Index b = 1; b < 5; b += 2) layer.gates.push_back({b, GateMatrix::Identity(), TimeKind::Real});
  EXPECT_EQ(apply_layer(m, layer, GateOptions{}), 0.0);
  EXPECT_LT(max_abs(mpo_to_dense(m) - before), 1e-12 * max_abs(before));
}

TEST(ApplyLayer, TrotterStepMatchesDenseCircuit) {
  const auto model = chaotic_model(6);
  auto m = mpo_pauli_string(6, {{3, Pauli::Y}});
  Matrix<cplx> dense = embed_string(6, {{3, Pauli::Y}});
  const DenseTrotterCircuit circuit(model, 0.05);
  const auto scheme = trotter_step(model, 0.05, TimeKind::Real);
  for (int s = 0; s < 3; ++s) {
    for (const auto& layer : scheme.layers) apply_layer(m, layer, GateOptions{});
    circuit.step(dense);
  }
  EXPECT_LT(max_abs(mpo_to_dense(m) - dense), 1e-12);
}

TEST(ApplyLayer, UntruncatedStepPreservesNormAndTrace) {
  const auto model = chaotic_model(6);
  auto m = random_mpo(6, 4, 33);
  const auto id = mpo_identity(6);
  const double norm = hs_norm2(m);
  const double trace = hs_inner(id, m);
  const auto scheme = trotter_step(model, 0.1, TimeKind::Real);
  for (int s = 0; s < 4; ++s) {
    for (const auto& layer : scheme.layers) EXPECT_LE(apply_layer(m, layer, GateOptions{}), 1e-24);
  }
  EXPECT_NEAR(hs_norm2(m), norm, 1e-10 * norm);
  EXPECT_NEAR(hs_inner(id, m), trace, 1e-10 * std::max(1.0, std::abs(trace)));
}

TEST(ApplyLayer, EvolvedOperatorStaysHermitian) {
  // Real Pauli coefficients are equivalent to a Hermitian operator; compare
  // against an independent dense evolution that carries complex entries.
  const auto model = chaotic_model(5);
  auto m = mpo_pauli_string(5, {{2, Pauli::X}});
  Matrix<cplx> dense = embed_string(5, {{2, Pauli::X}});
  const DenseTrotterCircuit circuit(model, 0.1);
  const auto scheme = trotter_step(model, 0.1, TimeKind::Real);
  for (int s = 0; s < 5; ++s) {
    for (const auto& layer : scheme.layers) apply_layer(m, layer, GateOptions{});
    circuit.step(dense);
  }
  EXPECT_TRUE(testing::all_finite_real(m));
  EXPECT_LT(pauli_from_dense(dense).imag().cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(hermitian_defect(mpo_to_dense(m)), 1e-13);
}

TEST(ApplyLayer, SweepsAreBitwiseDeterministic) {
  const auto scheme = trotter_step(chaotic_model(10), 0.01, TimeKind::Real);
  auto run = [&]() {
    auto m = mpo_pauli_string(10, {{5, Pauli::Y}});
    double eta = 0.0;
    for (int s = 0; s < 50; ++s) {
      for (const auto& layer : scheme.layers) eta += apply_layer(m, layer, GateOptions{6, false});
    }
    return std::make_pair(m, eta);
  };
  const auto [a, eta_a] = run();
  const auto [b, eta_b] = run();
  EXPECT_EQ(eta_a, eta_b);
  ASSERT_EQ(a.bond_dims(), b.bond_dims());
  for (Index j = 0; j < a.size(); ++j) {
    EXPECT_EQ(std::memcmp(a.site(j).data(), b.site(j).data(), sizeof(double) * a.site(j).size()), 0);
  }
}

TEST(ApplyLayer, ReportsPerGate) {
  auto m = mpo_pauli_string(6, {{3, Pauli::Y}});
  const auto scheme = trotter_step(chaotic_model(6), 0.1, TimeKind::Real);
  std::vector<TruncationReport> reports;
  const double eta = apply_layer(m, scheme.layers[1], GateOptions{2, false}, &reports);
  EXPECT_EQ(reports.size(), scheme.layers[1].gates.size());
  double sum = 0.0;
  for (const auto& r : reports) sum += r.eta;
  EXPECT_DOUBLE_EQ(sum, eta);
}

// --- snapshots --------------------------------------------------------------

TEST(Snapshot, RoundTrip) {
  auto m = random_mpo(5, 7, 4);
  canonicalize(m, 3);
  m.set_log_norm(-1.25);
  std::stringstream buf;
  save_snapshot(m, buf);
  const auto back = load_snapshot(buf);
  EXPECT_EQ(back.bond_dims(), m.bond_dims());
  EXPECT_EQ(back.center(), m.center());
  EXPECT_EQ(back.log_norm(), m.log_norm());
  for (Index j = 0; j < m.size(); ++j) {
    EXPECT_EQ(std::memcmp(back.site(j).data(), m.site(j).data(), sizeof(double) * m.site(j).size()), 0);
  }
}

TEST(Snapshot, RejectsTruncatedStream) {
  std::stringstream buf;
  save_snapshot(random_mpo(4, 4, 1), buf);
  const std::string bytes = buf.str();
  std::stringstream cut(bytes.substr(0, bytes.size() - 9));
  EXPECT_THROW(load_snapshot(cut), PreconditionError);
  std::stringstream junk("not a snapshot at all");
  EXPECT_THROW(load_snapshot(junk), PreconditionError);
}

}  // namespace
}  // namespace tdmpo
