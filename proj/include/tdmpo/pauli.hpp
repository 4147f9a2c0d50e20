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

#include <array>
#include <cstdint>
#include <string>

#include "tdmpo/errors.hpp"

namespace tdmpo {

/// Single-site Pauli letter. The numeric value is the physical index of an
/// MPO tensor; two-site strings are indexed as 4 * left + right.
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr std::array<Pauli, 4> kPauliLetters{Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};

inline Eigen::Matrix2cd pauli_matrix(Pauli p) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -1i, 1i, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Eigen::Matrix2cd pauli_matrix(int index) { return pauli_matrix(static_cast<Pauli>(index)); }

inline char pauli_char(Pauli p) { return "ixyz"[static_cast<int>(p)]; }

inline Pauli parse_pauli(char c) {
  switch (c) {
    case 'i': case 'I': case '0': return Pauli::I;
    case 'x': case 'X': return Pauli::X;
    case 'y': case 'Y': return Pauli::Y;
    case 'z': case 'Z': return Pauli::Z;
    default: break;
  }
  throw PreconditionError(std::string("unknown Pauli letter '") + c + "'");
}

/// 4x4 matrix of the two-site string with combined index p = 4 * left + right.
inline Eigen::Matrix4cd pauli_pair_matrix(int p) {
  const Eigen::Matrix2cd a = pauli_matrix(p / 4);
  const Eigen::Matrix2cd b = pauli_matrix(p % 4);
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace tdmpo
