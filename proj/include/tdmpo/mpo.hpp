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

// Matrix product operators over the Pauli basis.
//
// An operator on n qubits is stored through its real Pauli coefficients
//   O = exp(log_norm) * sum_s  T_0[s_0] T_1[s_1] ... T_{n-1}[s_{n-1}]  sigma^{s_0} x ... x sigma^{s_{n-1}}
// with open boundaries (outer bond dimensions are 1). Hermitian operators
// have real coefficients, so every tensor here is real. The superket inner
// product is <A|B> = 2^-n tr(A^dagger B), under which Pauli strings are
// orthonormal and the tensors behave like an MPS with local dimension 4.

#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tdmpo/gate.hpp"
#include "tdmpo/linalg.hpp"
#include "tdmpo/pauli.hpp"

namespace tdmpo {

/// Rank-3 tensor T[left, s, right], s in {0, x, y, z}. Row-major storage makes
/// both (4 left) x right and left x (4 right) reshapes free.
class SiteTensor {
 public:
  using LeftMap = Eigen::Map<RowMatrixXd>;
  using ConstLeftMap = Eigen::Map<const RowMatrixXd>;

  SiteTensor() : SiteTensor(1, 1) {}
  SiteTensor(Index left, Index right);
  /// Takes a (4 left) x right matrix with rows ordered l * 4 + s.
  SiteTensor(Index left, RowMatrixXd left_matrix);

  Index left_dim() const { return left_; }
  Index right_dim() const { return right_; }

  double& operator()(Index l, Index s, Index r) { return data_(l * 4 + s, r); }
  double operator()(Index l, Index s, Index r) const { return data_(l * 4 + s, r); }

  /// (4 left) x right view, row index l * 4 + s.
  LeftMap as_left() { return {data_.data(), 4 * left_, right_}; }
  ConstLeftMap as_left() const { return {data_.data(), 4 * left_, right_}; }
  /// left x (4 right) view, column index s * right + r.
  LeftMap as_right() { return {data_.data(), left_, 4 * right_}; }
  ConstLeftMap as_right() const { return {data_.data(), left_, 4 * right_}; }

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }
  Index size() const { return data_.size(); }

  /// Slice A[s] as a left x right matrix.
  RowMatrixXd slice(Index s) const;

 private:
  Index left_;
  Index right_;
  RowMatrixXd data_;
};

class Mpo {
 public:
  explicit Mpo(std::vector<SiteTensor> sites, double log_norm = 0.0,
               std::optional<Index> center = std::nullopt);

  Index size() const { return static_cast<Index>(sites_.size()); }
  const SiteTensor& site(Index j) const { return sites_.at(static_cast<std::size_t>(j)); }
  SiteTensor& site(Index j) { return sites_.at(static_cast<std::size_t>(j)); }
  const std::vector<SiteTensor>& sites() const { return sites_; }

  /// D_0 .. D_n, with D_0 = D_n = 1.
  std::vector<Index> bond_dims() const;
  Index max_bond() const;

  /// Orthogonality center, or nullopt when no gauge is known.
  std::optional<Index> center() const { return center_; }
  void set_center(std::optional<Index> c) { center_ = c; }

  double log_norm() const { return log_norm_; }
  void set_log_norm(double v) { log_norm_ = v; }

  /// Replace the pair (j, j+1); bond dimensions must stay consistent.
  void replace_pair(Index j, SiteTensor left, SiteTensor right);
  void replace_site(Index j, SiteTensor t);

 private:
  std::vector<SiteTensor> sites_;
  double log_norm_ = 0.0;
  std::optional<Index> center_;
};

/// Singular-value weights below this are treated as exact zeros.
inline constexpr double kZeroWeight = 1e-28;

struct TruncationReport {
  Index bond = 0;
  double eta = 0.0;  // discarded normalized weight
  Index kept = 0;
  std::vector<double> discarded_weight_spectrum;  // normalized lambda^2 that were cut
};

inline constexpr Index kUnboundedBond = std::numeric_limits<Index>::max();

struct GateOptions {
  Index d_max = kUnboundedBond;
  bool renormalize = false;
};

/// One term of a translation-invariant sum: a single letter at offset 0, or
/// two letters at offsets 0 and 1.
struct LocalPattern {
  double coefficient = 1.0;
  std::vector<std::pair<Index, Pauli>> factors;
};

Mpo mpo_identity(Index n);
Mpo mpo_pauli_string(Index n, const std::map<Index, Pauli>& letters);
/// sum_j sum_patterns coefficient * (pattern placed at j), via the standard
/// finite-state construction (bond dimension 2 + number of two-site patterns).
Mpo mpo_extensive(Index n, const std::vector<LocalPattern>& patterns);

/// Brings the MPO into mixed-canonical form around `center`. A no-op when it
/// is already centered there.
void canonicalize(Mpo& mpo, Index center);
/// Moves an existing orthogonality center (canonicalizes first if none).
void move_center(Mpo& mpo, Index center);

/// Applies a two-site superoperator at (bond, bond + 1), re-splits by SVD and
/// truncates to at most d_max values. The singular value moves to the side
/// given by `absorb`, which also becomes the new orthogonality center.
TruncationReport apply_gate(Mpo& mpo, Index bond, const GateMatrix& gate,
                            const GateOptions& options,
                            Sweep absorb = Sweep::LeftToRight);

/// Applies every gate of the layer in one sweep; returns the summed eta.
double apply_layer(Mpo& mpo, const GateLayer& layer, const GateOptions& options,
                   std::vector<TruncationReport>* reports = nullptr);

/// <a|b> = 2^-n tr(a^dagger b), exact contraction including log_norm factors.
double hs_inner(const Mpo& a, const Mpo& b);
inline double hs_norm2(const Mpo& a) { return hs_inner(a, a); }

/// All 4^n Pauli coefficients (site 0 is the most significant base-4 digit).
Eigen::VectorXd pauli_coefficients(const Mpo& mpo);

/// Largest chain handled by the dense bridges.
inline constexpr Index kMaxDenseSites = 12;

Matrix<cplx> mpo_to_dense(const Mpo& mpo);
/// Exact (untruncated) MPO of a Hermitian dense operator.
Mpo mpo_from_dense(const Matrix<cplx>& op);

/// Dense operator from 4^n Pauli coefficients and back.
Matrix<cplx> dense_from_pauli(const Eigen::VectorXcd& coefficients, Index n);
Eigen::VectorXcd pauli_from_dense(const Matrix<cplx>& op);

/// Largest |T^T T - 1| (left of center) or |T T^T - 1| (right of center).
double gauge_defect(const Mpo& mpo);

// Snapshot format (binary, little-endian host layout):
//   "TDMPOSN1" | n:u64 | center:i64 (-1 if none) | log_norm:f64 |
//   bond dims (n+1) x u64 | tensors site by site, raw doubles
void save_snapshot(const Mpo& mpo, std::ostream& out);
Mpo load_snapshot(std::istream& in);
void save_snapshot(const Mpo& mpo, const std::string& path);
Mpo load_snapshot(const std::string& path);

}  // namespace tdmpo
