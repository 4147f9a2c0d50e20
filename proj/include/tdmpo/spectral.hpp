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

// Level-spacing statistics: reflection-parity resolution, staircase
// unfolding, and comparison with the Wigner surmise and Poisson law.

#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "tdmpo/linalg.hpp"

namespace tdmpo {

struct SpectralData {
  Eigen::VectorXd eigenvalues;     // ascending within each parity block
  std::vector<int> parity_labels;  // +1 symmetric, -1 antisymmetric
  double window_min = 0.0;         // full spectral range
  double window_max = 0.0;

  /// Sorted eigenvalues carrying the given label.
  std::vector<double> sector(int parity) const;
};

/// Dimensions of the reflection-symmetric and -antisymmetric subspaces.
std::pair<Index, Index> reflection_sector_dims(Index n);

/// Image of basis state i under site reversal.
Index reverse_bits(Index i, Index n);

/// Block-diagonalizes h in the site-reversal eigenbasis and diagonalizes each
/// block. Throws if h does not commute with the reversal (within 1e-10).
SpectralData parity_sectors(const Eigen::MatrixXd& h, Index n);
SpectralData parity_sectors(const Matrix<cplx>& h, Index n);

struct UnfoldOptions {
  double window_min = -9.0;
  double window_max = 9.0;
  int degree = 9;
  Index min_levels = 100;  // per sector
};

/// Per sector: fits the staircase inside the window with a polynomial, maps
/// levels through it and takes nearest-neighbour differences. Sectors are
/// pooled and the pooled mean rescaled to 1.
std::vector<double> unfold_spacings(const SpectralData& data, const UnfoldOptions& options = {});
/// Unfolding of a single ascending level sequence (no pooling, no rescale).
std::vector<double> unfold_levels(const std::vector<double>& levels, const UnfoldOptions& options);

struct SpacingHistogram {
  std::vector<double> edges;      // bins + 1 uniform edges over [0, s_max]
  std::vector<double> densities;  // integrate to 1 over the in-range samples
  Index sample_count = 0;
  double mean_spacing = 0.0;
};

SpacingHistogram spacing_histogram(const std::vector<double>& samples, Index bins = 40,
                                   double s_max = 4.0);

double wigner_pdf(double s);   // (pi s / 2) exp(-pi s^2 / 4)
double wigner_cdf(double s);
double poisson_pdf(double s);  // exp(-s)
double poisson_cdf(double s);

struct LsdReport {
  double ks_wigner = 0.0;
  double ks_poisson = 0.0;
  std::string verdict;  // "wigner" or "poisson"
  Index samples = 0;
  double fraction_below_quarter = 0.0;  // P(s < 0.25)
};

/// Kolmogorov-Smirnov distance of the empirical spacing CDF to both
/// references; the verdict is the nearer one. Needs at least 500 samples.
LsdReport lsd_compare(std::vector<double> samples);

}  // namespace tdmpo
