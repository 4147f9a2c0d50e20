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

#include "tdmpo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace tdmpo {

namespace {

struct BasisVector {
  Index a;
  Index b;     // == a for palindromic states
  double sign;  // coefficient of b relative to a
};

std::vector<BasisVector> sector_basis(Index n, int parity) {
  std::vector<BasisVector> basis;
  const Index dim = Index{1} << n;
  for (Index i = 0; i < dim; ++i) {
    const Index r = reverse_bits(i, n);
    if (i == r) {
      if (parity > 0) basis.push_back({i, i, 0.0});
    } else if (i < r) {
      basis.push_back({i, r, parity > 0 ? 1.0 : -1.0});
    }
  }
  return basis;
}

template <typename Scalar>
Matrix<Scalar> project(const Matrix<Scalar>& h, const std::vector<BasisVector>& basis) {
  const Index m = static_cast<Index>(basis.size());
  Matrix<Scalar> block(m, m);
  const double s2 = 1.0 / std::sqrt(2.0);
  for (Index q = 0; q < m; ++q) {
    const auto& vq = basis[static_cast<std::size_t>(q)];
    for (Index p = 0; p < m; ++p) {
      const auto& vp = basis[static_cast<std::size_t>(p)];
      Scalar acc;
      if (vp.a == vp.b && vq.a == vq.b) {
        acc = h(vp.a, vq.a);
      } else if (vp.a == vp.b) {
        acc = s2 * (h(vp.a, vq.a) + vq.sign * h(vp.a, vq.b));
      } else if (vq.a == vq.b) {
        acc = s2 * (h(vp.a, vq.a) + vp.sign * h(vp.b, vq.a));
      } else {
        acc = 0.5 * (h(vp.a, vq.a) + vq.sign * h(vp.a, vq.b) + vp.sign * h(vp.b, vq.a) +
                     vp.sign * vq.sign * h(vp.b, vq.b));
      }
      block(p, q) = acc;
    }
  }
  return block;
}

template <typename Scalar>
SpectralData parity_sectors_impl(const Matrix<Scalar>& h, Index n) {
  const Index dim = Index{1} << n;
  if (h.rows() != dim || h.cols() != dim) {
    throw PreconditionError("parity_sectors: matrix is not 2^n x 2^n");
  }
  require_hermitian(h, "parity_sectors");
  double comm = 0.0;
  for (Index j = 0; j < dim; ++j) {
    const Index rj = reverse_bits(j, n);
    for (Index i = 0; i < dim; ++i) {
      comm = std::max(comm, std::abs(h(i, j) - h(reverse_bits(i, n), rj)));
    }
  }
  if (comm > 1e-10) {
    std::ostringstream os;
    os << "parity_sectors: Hamiltonian does not commute with site reversal (max |[H,P]| entry "
       << comm << ")";
    throw PreconditionError(os.str());
  }

  SpectralData out;
  std::vector<double> values;
  for (int parity : {+1, -1}) {
    const auto basis = sector_basis(n, parity);
    if (basis.empty()) continue;
    const Eigen::VectorXd ev = eigvalsh(project(h, basis));
    for (Index k = 0; k < ev.size(); ++k) {
      values.push_back(ev(k));
      out.parity_labels.push_back(parity);
    }
  }
  out.eigenvalues = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
  out.window_min = out.eigenvalues.minCoeff();
  out.window_max = out.eigenvalues.maxCoeff();
  return out;
}

}  // namespace

std::vector<double> SpectralData::sector(int parity) const {
  std::vector<double> out;
  for (std::size_t k = 0; k < parity_labels.size(); ++k) {
    if (parity_labels[k] == parity) out.push_back(eigenvalues(static_cast<Index>(k)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Index reverse_bits(Index i, Index n) {
  Index r = 0;
  for (Index k = 0; k < n; ++k) r |= ((i >> k) & 1) << (n - 1 - k);
  return r;
}

std::pair<Index, Index> reflection_sector_dims(Index n) {
  const Index dim = Index{1} << n;
  const Index palindromes = Index{1} << ((n + 1) / 2);
  const Index pairs = (dim - palindromes) / 2;
  return {pairs + palindromes, pairs};
}

SpectralData parity_sectors(const Eigen::MatrixXd& h, Index n) { return parity_sectors_impl(h, n); }
SpectralData parity_sectors(const Matrix<cplx>& h, Index n) { return parity_sectors_impl(h, n); }

std::vector<double> unfold_levels(const std::vector<double>& levels, const UnfoldOptions& options) {
  std::vector<double> in_window;
  for (double e : levels) {
    if (e >= options.window_min && e <= options.window_max) in_window.push_back(e);
  }
  std::sort(in_window.begin(), in_window.end());
  const auto m = static_cast<Index>(in_window.size());
  if (m < options.min_levels) {
    std::ostringstream os;
    os << "unfold_spacings: only " << m << " levels in window [" << options.window_min << ", "
       << options.window_max << "], need " << options.min_levels;
    throw PreconditionError(os.str());
  }
  if (options.degree < 1) throw PreconditionError("unfold_spacings: degree must be >= 1");

  // Staircase N(E_k) = k + 1/2 fitted on x in [-1, 1].
  const double mid = 0.5 * (options.window_max + options.window_min);
  const double half = 0.5 * (options.window_max - options.window_min);
  const int deg = options.degree;
  Eigen::MatrixXd vander(m, deg + 1);
  Eigen::VectorXd target(m);
  for (Index k = 0; k < m; ++k) {
    const double x = (in_window[static_cast<std::size_t>(k)] - mid) / half;
    double p = 1.0;
    for (int d = 0; d <= deg; ++d) {
      vander(k, d) = p;
      p *= x;
    }
    target(k) = static_cast<double>(k) + 0.5;
  }
  const Eigen::VectorXd coef = vander.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd unfolded = vander * coef;
  std::vector<double> spacings;
  spacings.reserve(static_cast<std::size_t>(m - 1));
  for (Index k = 0; k + 1 < m; ++k) spacings.push_back(unfolded(k + 1) - unfolded(k));
  return spacings;
}

std::vector<double> unfold_spacings(const SpectralData& data, const UnfoldOptions& options) {
  std::vector<double> pooled;
  for (int parity : {+1, -1}) {
    const auto levels = data.sector(parity);
    if (levels.empty()) continue;
    const auto s = unfold_levels(levels, options);
    pooled.insert(pooled.end(), s.begin(), s.end());
  }
  if (pooled.empty()) throw PreconditionError("unfold_spacings: no levels");
  const double mean = std::accumulate(pooled.begin(), pooled.end(), 0.0) / static_cast<double>(pooled.size());
  for (double& s : pooled) s /= mean;
  return pooled;
}

SpacingHistogram spacing_histogram(const std::vector<double>& samples, Index bins, double s_max) {
  if (bins < 1 || !(s_max > 0.0)) throw PreconditionError("spacing_histogram: bad binning");
  SpacingHistogram hist;
  const double width = s_max / static_cast<double>(bins);
  for (Index b = 0; b <= bins; ++b) hist.edges.push_back(width * static_cast<double>(b));
  std::vector<Index> counts(static_cast<std::size_t>(bins), 0);
  Index in_range = 0;
  double sum = 0.0;
  for (double s : samples) {
    sum += s;
    if (s < 0.0 || s > s_max) continue;
    auto b = static_cast<Index>(s / width);
    if (b == bins) b = bins - 1;
    ++counts[static_cast<std::size_t>(b)];
    ++in_range;
  }
  hist.sample_count = static_cast<Index>(samples.size());
  hist.mean_spacing = samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
  for (Index c : counts) {
    hist.densities.push_back(in_range ? static_cast<double>(c) / (static_cast<double>(in_range) * width) : 0.0);
  }
  return hist;
}

double wigner_pdf(double s) {
  using std::numbers::pi;
  return 0.5 * pi * s * std::exp(-0.25 * pi * s * s);
}
double wigner_cdf(double s) { return s <= 0.0 ? 0.0 : 1.0 - std::exp(-0.25 * std::numbers::pi * s * s); }
double poisson_pdf(double s) { return s < 0.0 ? 0.0 : std::exp(-s); }
double poisson_cdf(double s) { return s <= 0.0 ? 0.0 : 1.0 - std::exp(-s); }

LsdReport lsd_compare(std::vector<double> samples) {
  if (samples.size() < 500) {
    std::ostringstream os;
    os << "lsd_compare: need at least 500 spacings, got " << samples.size();
    throw PreconditionError(os.str());
  }
  std::sort(samples.begin(), samples.end());
  const double count = static_cast<double>(samples.size());
  LsdReport rep;
  rep.samples = static_cast<Index>(samples.size());
  Index below = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double s = samples[i];
    const double lo = static_cast<double>(i) / count;
    const double hi = static_cast<double>(i + 1) / count;
    const double w = wigner_cdf(s);
    const double p = poisson_cdf(s);
    rep.ks_wigner = std::max({rep.ks_wigner, std::abs(w - lo), std::abs(w - hi)});
    rep.ks_poisson = std::max({rep.ks_poisson, std::abs(p - lo), std::abs(p - hi)});
    if (s < 0.25) ++below;
  }
  rep.fraction_below_quarter = static_cast<double>(below) / count;
  rep.verdict = rep.ks_wigner < rep.ks_poisson ? "wigner" : "poisson";
  return rep;
}

}  // namespace tdmpo
