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

#pragma once

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qit {

inline constexpr unsigned kMaxQubits = 14;
inline constexpr unsigned kMaxDenseQubits = 8;  // brute-force matrix paths stay sub-second here
inline constexpr double kImagResidueTol = 1e-9;
inline constexpr double kBlochNormTol = 1e-12;

enum class PauliLetter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

constexpr std::uint64_t pauli_count(unsigned num_qubits) noexcept {
  return std::uint64_t{1} << (2 * num_qubits);
}

/// An n-qubit Pauli word stored as a base-4 integer: digit j (qubit j, with
/// qubit 0 least significant) is 0=I, 1=X, 2=Y, 3=Z. Index 0 is the
/// all-identity word.
class PauliString {
 public:
  PauliString(unsigned num_qubits, std::uint64_t index) : n_(num_qubits), index_(index) {
    if (n_ < 1 || n_ > kMaxQubits) {
      throw std::invalid_argument("PauliString: qubit count must lie in [1, 14]");
    }
    if (index_ >= pauli_count(n_)) {
      throw std::out_of_range("PauliString: index out of range for qubit count");
    }
  }

  /// Parses a letter word such as "XZ"; the leftmost letter is the highest
  /// qubit, so "XZ" has X on qubit 1 and Z on qubit 0.
  static PauliString from_letters(std::string_view letters) {
    const auto n = letters.size();
    if (n < 1 || n > kMaxQubits) {
      throw std::invalid_argument("PauliString: word length must lie in [1, 14]");
    }
    std::uint64_t index = 0;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const unsigned qubit = static_cast<unsigned>(n - 1 - pos);
      std::uint64_t digit = 0;
      switch (letters[pos]) {
        case 'I': digit = 0; break;
        case 'X': digit = 1; break;
        case 'Y': digit = 2; break;
        case 'Z': digit = 3; break;
        default:
          throw std::invalid_argument(std::string("PauliString: invalid letter '") +
                                      letters[pos] + "'");
      }
      index |= digit << (2 * qubit);
    }
    return PauliString(static_cast<unsigned>(n), index);
  }

  unsigned num_qubits() const noexcept { return n_; }
  std::uint64_t index() const noexcept { return index_; }
  bool is_identity() const noexcept { return index_ == 0; }

  PauliLetter letter(unsigned qubit) const {
    if (qubit >= n_) {
      throw std::out_of_range("PauliString: qubit out of range");
    }
    return static_cast<PauliLetter>((index_ >> (2 * qubit)) & 3);
  }

  std::string str() const {
    static constexpr char kNames[4] = {'I', 'X', 'Y', 'Z'};
    std::string out(n_, 'I');
    for (unsigned q = 0; q < n_; ++q) {
      out[n_ - 1 - q] = kNames[static_cast<unsigned>(letter(q))];
    }
    return out;
  }

  /// Bit mask over qubits whose letter flips basis states (X or Y).
  std::uint64_t flip_mask() const noexcept {
    std::uint64_t mask = 0;
    for (unsigned q = 0; q < n_; ++q) {
      const auto digit = (index_ >> (2 * q)) & 3;
      if (digit == 1 || digit == 2) {
        mask |= std::uint64_t{1} << q;
      }
    }
    return mask;
  }

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  unsigned n_;
  std::uint64_t index_;
};

/// The four single-qubit Pauli matrices, indexed by PauliLetter. sigma_Y uses
/// the (0,1)-entry = +i sign convention; every dense construction and
/// expectation path in the library shares it.
inline const std::array<Eigen::Matrix2cd, 4>& pauli_matrices() {
  static const std::array<Eigen::Matrix2cd, 4> mats = [] {
    const std::complex<double> i(0.0, 1.0);
    std::array<Eigen::Matrix2cd, 4> m;
    m[0] << 1, 0, 0, 1;
    m[1] << 0, 1, 1, 0;
    m[2] << 0, i, -i, 0;
    m[3] << 1, 0, 0, -1;
    return m;
  }();
  return mats;
}

namespace detail {

// Column action of a Pauli word: P e_c = i^{phase_exp(c)} e_{c ^ flip_mask}.
// Y contributes -i on an unset column bit and +i on a set one; Z contributes
// -1 on a set bit.
struct PauliAction {
  std::uint64_t flip_mask = 0;
  std::uint64_t y_mask = 0;
  std::uint64_t z_mask = 0;

  explicit PauliAction(const PauliString& p) {
    for (unsigned q = 0; q < p.num_qubits(); ++q) {
      const std::uint64_t bit = std::uint64_t{1} << q;
      switch (p.letter(q)) {
        case PauliLetter::I: break;
        case PauliLetter::X: flip_mask |= bit; break;
        case PauliLetter::Y: flip_mask |= bit; y_mask |= bit; break;
        case PauliLetter::Z: z_mask |= bit; break;
      }
    }
  }

  std::complex<double> phase(std::uint64_t column) const noexcept {
    const unsigned t = (2u * (std::popcount(column & z_mask) % 2) +
                        1u * (std::popcount(column & y_mask) % 4) +
                        3u * (std::popcount(~column & y_mask) % 4)) %
                       4u;
    static constexpr std::complex<double> kPowersOfI[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    return kPowersOfI[t];
  }
};

}  // namespace detail

/// Tr(P Q) for Pauli words: 2^n when P == Q, otherwise 0.
inline double pauli_pair_trace(const PauliString& p, const PauliString& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw std::invalid_argument("pauli_pair_trace: qubit counts differ");
  }
  return p == q ? static_cast<double>(std::uint64_t{1} << p.num_qubits()) : 0.0;
}

/// Explicit 2^n x 2^n matrix of a Pauli word (n <= kMaxDenseQubits).
inline Eigen::MatrixXcd pauli_dense_matrix(const PauliString& p) {
  if (p.num_qubits() > kMaxDenseQubits) {
    throw std::invalid_argument("pauli_dense_matrix: qubit count exceeds dense cap");
  }
  const std::uint64_t dim = std::uint64_t{1} << p.num_qubits();
  const detail::PauliAction action(p);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
  for (std::uint64_t c = 0; c < dim; ++c) {
    m(static_cast<Eigen::Index>(c ^ action.flip_mask), static_cast<Eigen::Index>(c)) =
        action.phase(c);
  }
  return m;
}

/// <P> for a product state given per-qubit Bloch vectors: the product over
/// qubits of 1 for an identity letter and the matching Bloch component
/// otherwise.
inline double expectation_product(std::span<const std::array<double, 3>> blochs,
                                  const PauliString& p) {
  if (blochs.size() != p.num_qubits()) {
    throw std::invalid_argument("expectation_product: Bloch vector count != qubit count");
  }
  double value = 1.0;
  for (unsigned q = 0; q < p.num_qubits(); ++q) {
    const auto& b = blochs[q];
    const double norm = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    if (norm > 1.0 + kBlochNormTol) {
      throw std::domain_error("expectation_product: Bloch norm " + std::to_string(norm) +
                              " exceeds 1 at qubit " + std::to_string(q));
    }
    switch (p.letter(q)) {
      case PauliLetter::I: break;
      case PauliLetter::X: value *= b[0]; break;
      case PauliLetter::Y: value *= b[1]; break;
      case PauliLetter::Z: value *= b[2]; break;
    }
  }
  return value;
}

/// <P> = Tr(rho P) for an explicit density matrix. Walks the single nonzero
/// entry per column of P, so the cost is O(2^n) rather than a matrix product.
/// A non-negligible imaginary residue means rho was not Hermitian.
inline double expectation_dense(const Eigen::MatrixXcd& rho, const PauliString& p) {
  if (p.num_qubits() > kMaxDenseQubits) {
    throw std::invalid_argument("expectation_dense: qubit count exceeds dense cap");
  }
  const std::uint64_t dim = std::uint64_t{1} << p.num_qubits();
  if (rho.rows() != static_cast<Eigen::Index>(dim) || rho.cols() != static_cast<Eigen::Index>(dim)) {
    throw std::invalid_argument("expectation_dense: matrix dimension does not match qubit count");
  }
  const detail::PauliAction action(p);
  std::complex<double> acc(0.0, 0.0);
  for (std::uint64_t r = 0; r < dim; ++r) {
    acc += rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r ^ action.flip_mask)) *
           action.phase(r);
  }
  if (std::abs(acc.imag()) > kImagResidueTol) {
    throw std::domain_error("expectation_dense: imaginary residue " +
                            std::to_string(acc.imag()) + " (input not Hermitian?)");
  }
  return acc.real();
}

}  // namespace qit
