// Copyright 2026 The qit Authors
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

// Brute-force oracles for the test suites. Everything here is built from the
// 2x2 matrices below with plain Kronecker products and O(d^3) matrix
// arithmetic, independent of the library's bit-twiddling fast paths, so the
// two can cross-check each other.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <random>
#include <string>
#include <vector>

namespace qit_test {

inline Eigen::Matrix2cd single_pauli(char letter) {
  const std::complex<double> i(0.0, 1.0);
  Eigen::Matrix2cd m;
  switch (letter) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, i, -i, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: throw std::invalid_argument("single_pauli: bad letter");
  }
  return m;
}

inline Eigen::MatrixXcd naive_kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

/// Pauli word from letters, leftmost letter = highest qubit.
inline Eigen::MatrixXcd naive_pauli(const std::string& letters) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
  for (const char letter : letters) {
    m = naive_kron(m, single_pauli(letter));
  }
  return m;
}

/// Pauli word from a base-4 index (digit j = qubit j; 0=I,1=X,2=Y,3=Z).
inline Eigen::MatrixXcd naive_pauli_from_index(unsigned n, std::uint64_t index) {
  static constexpr char kNames[4] = {'I', 'X', 'Y', 'Z'};
  std::string letters(n, 'I');
  for (unsigned q = 0; q < n; ++q) {
    letters[n - 1 - q] = kNames[(index >> (2 * q)) & 3];
  }
  return naive_pauli(letters);
}

/// (I + x X + y Y + z Z) / 2 for one qubit.
inline Eigen::Matrix2cd naive_bloch_qubit(double x, double y, double z) {
  return 0.5 * (single_pauli('I') + x * single_pauli('X') + y * single_pauli('Y') +
                z * single_pauli('Z'));
}

inline Eigen::MatrixXcd naive_product_density(
    const std::vector<std::array<double, 3>>& blochs) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
  for (auto it = blochs.rbegin(); it != blochs.rend(); ++it) {
    m = naive_kron(m, naive_bloch_qubit((*it)[0], (*it)[1], (*it)[2]));
  }
  return m;
}

inline double naive_expectation(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& pauli) {
  return (rho * pauli).trace().real();
}

/// Random Bloch vector with norm <= radius_cap (std::mt19937 driven; the
/// test-instance generator stays independent of the library RNG).
inline std::array<double, 3> random_bloch(std::mt19937& rng, double radius_cap = 1.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::array<double, 3> v{gauss(rng), gauss(rng), gauss(rng)};
  const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  const double radius = radius_cap * unit(rng);
  for (auto& c : v) {
    c *= norm == 0.0 ? 0.0 : radius / norm;
  }
  return v;
}

inline std::vector<std::array<double, 3>> random_blochs(std::mt19937& rng, unsigned n,
                                                        double radius_cap = 1.0) {
  std::vector<std::array<double, 3>> out;
  out.reserve(n);
  for (unsigned q = 0; q < n; ++q) {
    out.push_back(random_bloch(rng, radius_cap));
  }
  return out;
}

}  // namespace qit_test
