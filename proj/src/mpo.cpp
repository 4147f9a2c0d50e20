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

#include "tdmpo/mpo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace tdmpo {

namespace {

using Eigen::MatrixXd;

struct QrFactors {
  RowMatrixXd q;  // rows x k, orthonormal columns
  MatrixXd r;     // k x cols, upper triangular with nonnegative diagonal
};

// Thin Householder QR with the sign convention diag(R) >= 0, so that an
// already-orthonormal input comes back unchanged.
QrFactors thin_qr(const MatrixXd& m) {
  const Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<MatrixXd> qr(m);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(m.rows(), k);
  MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  for (Index i = 0; i < k; ++i) {
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  return {q, r};
}

SiteTensor from_right_matrix(const RowMatrixXd& m) {
  // left x (4 right) and (4 left) x right share the same row-major layout.
  const Index left = m.rows();
  const Index right = m.cols() / 4;
  RowMatrixXd as_left = Eigen::Map<const RowMatrixXd>(m.data(), 4 * left, right);
  return SiteTensor(left, std::move(as_left));
}

Index ipow4(Index n) { return Index{1} << (2 * n); }

void check_dense_size(Index n, const char* what) {
  if (n > kMaxDenseSites) {
    std::ostringstream os;
    const double gib = 16.0 * static_cast<double>(ipow4(std::min<Index>(n, 30))) / (1 << 30);
    os << what << ": n = " << n << " exceeds the dense limit of " << kMaxDenseSites
       << " sites (would need about " << gib << " GiB per dense operator)";
    throw CapacityError(os.str());
  }
}

// Left-orthonormalize site j and push the remainder into site j + 1.
void shift_center_right(Mpo& mpo, Index j) {
  const SiteTensor& a = mpo.site(j);
  auto f = thin_qr(MatrixXd(a.as_left()));
  RowMatrixXd next = f.r * mpo.site(j + 1).as_right();
  mpo.replace_pair(j, SiteTensor(a.left_dim(), std::move(f.q)), from_right_matrix(next));
}

// Right-orthonormalize site j and push the remainder into site j - 1.
void shift_center_left(Mpo& mpo, Index j) {
  const SiteTensor& b = mpo.site(j);
  auto f = thin_qr(MatrixXd(b.as_right().transpose()));
  RowMatrixXd qt = f.q.transpose();
  const SiteTensor& prev = mpo.site(j - 1);
  RowMatrixXd prev_new = prev.as_left() * f.r.transpose();
  const Index prev_left = prev.left_dim();
  mpo.replace_pair(j - 1, SiteTensor(prev_left, std::move(prev_new)), from_right_matrix(qt));
}

void check_site(const Mpo& mpo, Index j, const char* what) {
  if (j < 0 || j >= mpo.size()) {
    std::ostringstream os;
    os << what << ": site " << j << " out of range for n = " << mpo.size();
    throw PreconditionError(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SiteTensor / Mpo

SiteTensor::SiteTensor(Index left, Index right)
    : left_(left), right_(right), data_(RowMatrixXd::Zero(4 * left, right)) {
  if (left < 1 || right < 1) throw PreconditionError("SiteTensor: bond dimensions must be >= 1");
}

SiteTensor::SiteTensor(Index left, RowMatrixXd left_matrix)
    : left_(left), right_(left_matrix.cols()), data_(std::move(left_matrix)) {
  if (left < 1 || right_ < 1 || data_.rows() != 4 * left) {
    throw PreconditionError("SiteTensor: matrix shape does not match (4 * left) x right");
  }
}

RowMatrixXd SiteTensor::slice(Index s) const {
  RowMatrixXd out(left_, right_);
  for (Index l = 0; l < left_; ++l) out.row(l) = data_.row(l * 4 + s);
  return out;
}

Mpo::Mpo(std::vector<SiteTensor> sites, double log_norm, std::optional<Index> center)
    : sites_(std::move(sites)), log_norm_(log_norm), center_(center) {
  if (sites_.size() < 2) throw PreconditionError("Mpo: need at least 2 sites");
  if (sites_.front().left_dim() != 1 || sites_.back().right_dim() != 1) {
    throw PreconditionError("Mpo: boundary bond dimensions must be 1");
  }
  for (std::size_t j = 0; j + 1 < sites_.size(); ++j) {
    if (sites_[j].right_dim() != sites_[j + 1].left_dim()) {
      std::ostringstream os;
      os << "Mpo: bond " << j << " mismatch (" << sites_[j].right_dim() << " vs "
         << sites_[j + 1].left_dim() << ")";
      throw PreconditionError(os.str());
    }
  }
  if (!std::isfinite(log_norm_)) throw PreconditionError("Mpo: non-finite log_norm");
  if (center_ && (*center_ < 0 || *center_ >= size())) {
    throw PreconditionError("Mpo: orthogonality center out of range");
  }
}

std::vector<Index> Mpo::bond_dims() const {
  std::vector<Index> dims;
  dims.reserve(sites_.size() + 1);
  dims.push_back(sites_.front().left_dim());
  for (const auto& s : sites_) dims.push_back(s.right_dim());
  return dims;
}

Index Mpo::max_bond() const {
  Index d = 1;
  for (const auto& s : sites_) d = std::max(d, s.right_dim());
  return d;
}

void Mpo::replace_pair(Index j, SiteTensor left, SiteTensor right) {
  if (left.right_dim() != right.left_dim() || left.left_dim() != site(j).left_dim() ||
      right.right_dim() != site(j + 1).right_dim()) {
    throw PreconditionError("Mpo::replace_pair: inconsistent bond dimensions");
  }
  sites_[static_cast<std::size_t>(j)] = std::move(left);
  sites_[static_cast<std::size_t>(j + 1)] = std::move(right);
}

void Mpo::replace_site(Index j, SiteTensor t) {
  if (t.left_dim() != site(j).left_dim() || t.right_dim() != site(j).right_dim()) {
    throw PreconditionError("Mpo::replace_site: inconsistent bond dimensions");
  }
  sites_[static_cast<std::size_t>(j)] = std::move(t);
}

// ---------------------------------------------------------------------------
// Constructors

Mpo mpo_identity(Index n) { return mpo_pauli_string(n, {}); }

Mpo mpo_pauli_string(Index n, const std::map<Index, Pauli>& letters) {
  if (n < 2) throw PreconditionError("mpo_pauli_string: n must be >= 2");
  std::vector<SiteTensor> sites(static_cast<std::size_t>(n), SiteTensor(1, 1));
  for (Index j = 0; j < n; ++j) sites[static_cast<std::size_t>(j)](0, 0, 0) = 1.0;
  for (const auto& [j, p] : letters) {
    if (j < 0 || j >= n) {
      std::ostringstream os;
      os << "mpo_pauli_string: site " << j << " out of range for n = " << n;
      throw PreconditionError(os.str());
    }
    auto& t = sites[static_cast<std::size_t>(j)];
    t(0, 0, 0) = 0.0;
    t(0, static_cast<Index>(p), 0) = 1.0;
  }
  // Product of unit tensors: orthonormal from both sides.
  return Mpo(std::move(sites), 0.0, Index{0});
}

Mpo mpo_extensive(Index n, const std::vector<LocalPattern>& patterns) {
  if (n < 2) throw PreconditionError("mpo_extensive: n must be >= 2");
  if (patterns.empty()) throw PreconditionError("mpo_extensive: empty pattern list");
  std::vector<std::pair<double, Pauli>> singles;
  std::vector<std::tuple<double, Pauli, Pauli>> pairs;
  for (const auto& pat : patterns) {
    auto f = pat.factors;
    std::sort(f.begin(), f.end());
    if (f.size() == 1 && f[0].first == 0) {
      singles.emplace_back(pat.coefficient, f[0].second);
    } else if (f.size() == 2 && f[0].first == 0 && f[1].first == 1) {
      pairs.emplace_back(pat.coefficient, f[0].second, f[1].second);
    } else {
      throw PreconditionError(
          "mpo_extensive: patterns must be one letter at offset 0 or two letters at "
          "adjacent offsets 0 and 1");
    }
  }
  // Automaton states: 0 = nothing placed yet, 1 = term completed,
  // 2 + m = first letter of pair m placed.
  const Index d = 2 + static_cast<Index>(pairs.size());
  SiteTensor w(d, d);
  w(0, 0, 0) = 1.0;
  w(1, 0, 1) = 1.0;
  for (const auto& [c, p] : singles) w(0, static_cast<Index>(p), 1) += c;
  for (std::size_t m = 0; m < pairs.size(); ++m) {
    const auto& [c, a, b] = pairs[m];
    const Index state = 2 + static_cast<Index>(m);
    w(0, static_cast<Index>(a), state) = 1.0;
    w(state, static_cast<Index>(b), 1) = c;
  }

  std::vector<SiteTensor> sites;
  sites.reserve(static_cast<std::size_t>(n));
  SiteTensor first(1, d);
  for (Index s = 0; s < 4; ++s)
    for (Index r = 0; r < d; ++r) first(0, s, r) = w(0, s, r);
  sites.push_back(first);
  for (Index j = 1; j + 1 < n; ++j) sites.push_back(w);
  SiteTensor last(d, 1);
  for (Index l = 0; l < d; ++l)
    for (Index s = 0; s < 4; ++s) last(l, s, 0) = w(l, s, 1);
  sites.push_back(last);
  return Mpo(std::move(sites));
}

// ---------------------------------------------------------------------------
// Gauge

void canonicalize(Mpo& mpo, Index center) {
  check_site(mpo, center, "canonicalize");
  if (mpo.center()) {
    move_center(mpo, center);
    return;
  }
  for (Index j = 0; j < center; ++j) shift_center_right(mpo, j);
  for (Index j = mpo.size() - 1; j > center; --j) shift_center_left(mpo, j);
  mpo.set_center(center);
}

void move_center(Mpo& mpo, Index center) {
  check_site(mpo, center, "move_center");
  if (!mpo.center()) {
    canonicalize(mpo, center);
    return;
  }
  Index c = *mpo.center();
  while (c < center) shift_center_right(mpo, c++);
  while (c > center) shift_center_left(mpo, c--);
  mpo.set_center(center);
}

double gauge_defect(const Mpo& mpo) {
  if (!mpo.center()) return std::numeric_limits<double>::infinity();
  const Index c = *mpo.center();
  double worst = 0.0;
  for (Index j = 0; j < mpo.size(); ++j) {
    const auto& t = mpo.site(j);
    if (j < c) {
      const MatrixXd g = t.as_left().transpose() * t.as_left();
      worst = std::max(worst, (g - MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
    } else if (j > c) {
      const MatrixXd g = t.as_right() * t.as_right().transpose();
      worst = std::max(worst, (g - MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Gates

TruncationReport apply_gate(Mpo& mpo, Index bond, const GateMatrix& gate,
                            const GateOptions& options, Sweep absorb) {
  if (options.d_max < 1) throw PreconditionError("apply_gate: d_max must be >= 1");
  if (bond < 0 || bond + 1 >= mpo.size()) {
    std::ostringstream os;
    os << "apply_gate: bond " << bond << " out of range for n = " << mpo.size();
    throw PreconditionError(os.str());
  }
  if (!mpo.center()) {
    canonicalize(mpo, bond);
  } else if (*mpo.center() < bond) {
    move_center(mpo, bond);
  } else if (*mpo.center() > bond + 1) {
    move_center(mpo, bond + 1);
  }

  const SiteTensor& a = mpo.site(bond);
  const SiteTensor& b = mpo.site(bond + 1);
  const Index dl = a.left_dim();
  const Index dr = b.right_dim();

  // theta[l][4 s1 + s2][r], contiguous per l.
  RowMatrixXd theta = a.as_left() * b.as_right();
  RowMatrixXd scratch(16, dr);
  for (Index l = 0; l < dl; ++l) {
    Eigen::Map<RowMatrixXd> block(theta.data() + l * 16 * dr, 16, dr);
    scratch.noalias() = gate * block;
    block = scratch;
  }

  auto dec = svd(theta);
  Eigen::VectorXd s = dec.singular_values;
  const double total = s.squaredNorm();

  TruncationReport report;
  report.bond = bond;
  Index nonzero = 0;
  if (total > 0.0) {
    for (Index k = 0; k < s.size(); ++k) {
      if (s(k) * s(k) / total > kZeroWeight) ++nonzero;
    }
  }
  const Index kept = std::max<Index>(1, std::min(options.d_max, nonzero));
  report.kept = kept;
  if (total > 0.0) {
    // Weights under the zero floor are numerical noise, not discarded content.
    for (Index k = kept; k < nonzero; ++k) {
      const double w = s(k) * s(k) / total;
      report.eta += w;
      report.discarded_weight_spectrum.push_back(w);
    }
  }

  Eigen::VectorXd sk = s.head(kept);
  if (options.renormalize) {
    const double retained = std::sqrt(sk.squaredNorm());
    if (retained > 0.0) {
      sk /= retained;
      mpo.set_log_norm(mpo.log_norm() + std::log(retained));
    }
  }

  RowMatrixXd left_part;
  RowMatrixXd right_part;
  if (absorb == Sweep::LeftToRight) {
    left_part = dec.u.leftCols(kept);
    right_part = sk.asDiagonal() * dec.vdag.topRows(kept);
  } else {
    left_part = dec.u.leftCols(kept) * sk.asDiagonal();
    right_part = dec.vdag.topRows(kept);
  }
  mpo.replace_pair(bond, SiteTensor(dl, std::move(left_part)), from_right_matrix(right_part));
  mpo.set_center(absorb == Sweep::LeftToRight ? bond + 1 : bond);
  return report;
}

double apply_layer(Mpo& mpo, const GateLayer& layer, const GateOptions& options,
                   std::vector<TruncationReport>* reports) {
  std::vector<const AdjointGate*> order;
  order.reserve(layer.gates.size());
  for (const auto& g : layer.gates) order.push_back(&g);
  const bool rightward = layer.sweep == Sweep::LeftToRight;
  std::stable_sort(order.begin(), order.end(), [&](const AdjointGate* x, const AdjointGate* y) {
    return rightward ? x->bond < y->bond : x->bond > y->bond;
  });
  double eta = 0.0;
  for (const AdjointGate* g : order) {
    auto rep = apply_gate(mpo, g->bond, g->r, options, layer.sweep);
    eta += rep.eta;
    if (reports) reports->push_back(std::move(rep));
  }
  return eta;
}

// ---------------------------------------------------------------------------
// Contractions

double hs_inner(const Mpo& a, const Mpo& b) {
  if (a.size() != b.size()) {
    std::ostringstream os;
    os << "hs_inner: size mismatch (" << a.size() << " vs " << b.size() << ")";
    throw PreconditionError(os.str());
  }
  MatrixXd env = MatrixXd::Ones(1, 1);
  for (Index j = 0; j < a.size(); ++j) {
    const SiteTensor& ta = a.site(j);
    const SiteTensor& tb = b.site(j);
    RowMatrixXd tmp = env * tb.as_right();  // la x (4 rb)
    Eigen::Map<const RowMatrixXd> folded(tmp.data(), 4 * ta.left_dim(), tb.right_dim());
    env = ta.as_left().transpose() * folded;
  }
  return env(0, 0) * std::exp(a.log_norm() + b.log_norm());
}

Eigen::VectorXd pauli_coefficients(const Mpo& mpo) {
  check_dense_size(mpo.size(), "pauli_coefficients");
  RowMatrixXd acc = RowMatrixXd::Ones(1, 1);  // (4^k) x D_k
  for (Index j = 0; j < mpo.size(); ++j) {
    const SiteTensor& t = mpo.site(j);
    RowMatrixXd next = acc * t.as_right();
    acc = Eigen::Map<const RowMatrixXd>(next.data(), 4 * acc.rows(), t.right_dim());
  }
  return Eigen::Map<const Eigen::VectorXd>(acc.data(), acc.size()) * std::exp(mpo.log_norm());
}

Matrix<cplx> dense_from_pauli(const Eigen::VectorXcd& coefficients, Index n) {
  check_dense_size(n, "dense_from_pauli");
  const Index total = ipow4(n);
  if (coefficients.size() != total) throw PreconditionError("dense_from_pauli: need 4^n coefficients");
  using namespace std::complex_literals;
  // Per digit: (c0, cx, cy, cz) -> (M00, M01, M10, M11), digit value 2 i + j.
  Eigen::VectorXcd v = coefficients;
  for (Index k = 0; k < n; ++k) {
    const Index stride = ipow4(n - 1 - k);
    for (Index hi = 0; hi < total; hi += 4 * stride) {
      for (Index lo = 0; lo < stride; ++lo) {
        const Index base = hi + lo;
        const cplx c0 = v(base), cx = v(base + stride), cy = v(base + 2 * stride),
                   cz = v(base + 3 * stride);
        v(base) = c0 + cz;
        v(base + stride) = cx - 1i * cy;
        v(base + 2 * stride) = cx + 1i * cy;
        v(base + 3 * stride) = c0 - cz;
      }
    }
  }
  const Index dim = Index{1} << n;
  Matrix<cplx> out(dim, dim);
  for (Index e = 0; e < total; ++e) {
    Index i = 0, j = 0;
    for (Index k = 0; k < n; ++k) {
      const Index digit = (e >> (2 * (n - 1 - k))) & 3;
      i = (i << 1) | (digit >> 1);
      j = (j << 1) | (digit & 1);
    }
    out(i, j) = v(e);
  }
  return out;
}

Eigen::VectorXcd pauli_from_dense(const Matrix<cplx>& op) {
  const Index dim = op.rows();
  if (dim != op.cols() || dim < 2 || (dim & (dim - 1)) != 0) {
    throw PreconditionError("pauli_from_dense: expected a 2^n x 2^n matrix");
  }
  Index n = 0;
  while ((Index{1} << n) < dim) ++n;
  check_dense_size(n, "pauli_from_dense");
  const Index total = ipow4(n);
  using namespace std::complex_literals;
  Eigen::VectorXcd v(total);
  for (Index e = 0; e < total; ++e) {
    Index i = 0, j = 0;
    for (Index k = 0; k < n; ++k) {
      const Index digit = (e >> (2 * (n - 1 - k))) & 3;
      i = (i << 1) | (digit >> 1);
      j = (j << 1) | (digit & 1);
    }
    v(e) = op(i, j);
  }
  for (Index k = 0; k < n; ++k) {
    const Index stride = ipow4(n - 1 - k);
    for (Index hi = 0; hi < total; hi += 4 * stride) {
      for (Index lo = 0; lo < stride; ++lo) {
        const Index base = hi + lo;
        const cplx m00 = v(base), m01 = v(base + stride), m10 = v(base + 2 * stride),
                   m11 = v(base + 3 * stride);
        v(base) = 0.5 * (m00 + m11);
        v(base + stride) = 0.5 * (m01 + m10);
        v(base + 2 * stride) = 0.5i * (m01 - m10);
        v(base + 3 * stride) = 0.5 * (m00 - m11);
      }
    }
  }
  return v;
}

Matrix<cplx> mpo_to_dense(const Mpo& mpo) {
  check_dense_size(mpo.size(), "mpo_to_dense");
  return dense_from_pauli(pauli_coefficients(mpo).cast<cplx>(), mpo.size());
}

Mpo mpo_from_dense(const Matrix<cplx>& op) {
  require_hermitian(op, "mpo_from_dense");
  const Eigen::VectorXd coeffs = pauli_from_dense(op).real();
  Index n = 0;
  while ((Index{1} << n) < op.rows()) ++n;
  if (n < 2) throw PreconditionError("mpo_from_dense: need at least 2 sites");

  std::vector<SiteTensor> sites;
  RowMatrixXd rest = Eigen::Map<const RowMatrixXd>(coeffs.data(), 1, coeffs.size());
  Index dl = 1;
  for (Index k = 0; k + 1 < n; ++k) {
    const Index tail = ipow4(n - k - 1);
    Eigen::Map<const RowMatrixXd> m(rest.data(), 4 * dl, tail);
    auto dec = svd(MatrixXd(m));
    const double total = dec.singular_values.squaredNorm();
    Index keep = 0;
    for (Index i = 0; i < dec.singular_values.size(); ++i) {
      if (total > 0.0 && dec.singular_values(i) * dec.singular_values(i) / total > kZeroWeight) ++keep;
    }
    keep = std::max<Index>(keep, 1);
    sites.emplace_back(dl, RowMatrixXd(dec.u.leftCols(keep)));
    rest = dec.singular_values.head(keep).asDiagonal() * dec.vdag.topRows(keep);
    dl = keep;
  }
  sites.push_back(from_right_matrix(rest));
  return Mpo(std::move(sites), 0.0, n - 1);
}

}  // namespace tdmpo
