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

#pragma once

#include <Eigen/Dense>

#include <vector>

namespace tdmpo {

using GateMatrix = Eigen::Matrix<double, 16, 16>;

enum class TimeKind { Real, Imaginary };

enum class Sweep { LeftToRight, RightToLeft };

/// Superoperator of a two-site conjugation acting on Pauli coefficients:
/// coefficients c of O map to r * c, the coefficients of K^dagger O K.
struct AdjointGate {
  Eigen::Index bond = 0;  // acts on sites (bond, bond + 1)
  GateMatrix r = GateMatrix::Identity();
  TimeKind kind = TimeKind::Real;
};

/// Mutually commuting gates applied in one sweep.
struct GateLayer {
  Sweep sweep = Sweep::LeftToRight;
  std::vector<AdjointGate> gates;
};

}  // namespace tdmpo
