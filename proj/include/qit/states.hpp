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
#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qit/pauli.hpp"

namespace qit {

inline constexpr double kHermitianTol = 1e-9;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kEigenvalueFloor = -1e-9;

/// Product state given by one Bloch vector (x, y, z) per qubit; the density
/// matrix is the tensor product of (I + x sigma_X + y sigma_Y + z sigma_Z)/2.
struct ProductState {
  std::vector<std::array<double, 3>> blochs;

  unsigned num_qubits() const noexcept { return static_cast<unsigned>(blochs.size()); }
};

/// The state (I + eps * P) / 2^n: maximally mixed except for a single Pauli
/// direction. Positive semidefinite by construction for eps in (0, 1].
struct NeedleState {
  PauliString pauli;
  double eps = 0.0;

  unsigned num_qubits() const noexcept { return pauli.num_qubits(); }
};

/// Explicit density matrix, for states outside the two parametric families.
struct DenseState {
  unsigned n = 0;
  Eigen::MatrixXcd matrix;

  unsigned num_qubits() const noexcept { return n; }
};

using StateSpec = std::variant<ProductState, NeedleState, DenseState>;

inline unsigned num_qubits(const StateSpec& spec) {
  return std::visit([](const auto& s) { return s.num_qubits(); }, spec);
}

inline ProductState maximally_mixed(unsigned n) {
  return ProductState{std::vector<std::array<double, 3>>(n, {0.0, 0.0, 0.0})};
}

/// Checks the type invariants; returns the first violation (with its measured
/// residual) or nullopt when the state is valid.
inline std::optional<std::string> validate(const StateSpec& spec) {
  struct Visitor {
    std::optional<std::string> operator()(const ProductState& s) const {
      if (s.blochs.empty() || s.blochs.size() > kMaxQubits) {
        return "product state must have between 1 and 14 qubits";
      }
      for (std::size_t q = 0; q < s.blochs.size(); ++q) {
        const auto& b = s.blochs[q];
        const double norm = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
        if (norm > 1.0 + kBlochNormTol) {
          std::ostringstream msg;
          msg << "Bloch norm " << norm << " exceeds 1 at qubit " << q;
          return msg.str();
        }
      }
      return std::nullopt;
    }

    std::optional<std::string> operator()(const NeedleState& s) const {
      if (s.pauli.is_identity()) {
        return "needle Pauli must not be the identity";
      }
      if (!(s.eps > 0.0) || s.eps > 1.0) {
        std::ostringstream msg;
        msg << "needle eps " << s.eps << " outside (0, 1]";
        return msg.str();
      }
      return std::nullopt;
    }

    std::optional<std::string> operator()(const DenseState& s) const {
      if (s.n < 1 || s.n > kMaxDenseQubits) {
        return "dense state must have between 1 and 8 qubits";
      }
      const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << s.n);
      if (s.matrix.rows() != dim || s.matrix.cols() != dim) {
        return "dense matrix dimension does not match qubit count";
      }
      const double herm = (s.matrix - s.matrix.adjoint()).cwiseAbs().maxCoeff();
      if (herm > kHermitianTol) {
        std::ostringstream msg;
        msg << "Hermiticity residual " << herm << " exceeds " << kHermitianTol;
        return msg.str();
      }
      const std::complex<double> tr = s.matrix.trace();
      if (std::abs(tr - std::complex<double>(1.0, 0.0)) > kTraceTol) {
        std::ostringstream msg;
        msg << "trace " << tr.real() << (tr.imag() < 0 ? "-" : "+") << std::abs(tr.imag())
            << "i deviates from 1 by more than " << kTraceTol;
        return msg.str();
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
          (s.matrix + s.matrix.adjoint()) / 2.0);
      const double min_eig = solver.eigenvalues().minCoeff();
      if (min_eig < kEigenvalueFloor) {
        std::ostringstream msg;
        msg << "minimum eigenvalue " << min_eig << " below " << kEigenvalueFloor;
        return msg.str();
      }
      return std::nullopt;
    }
  };
  return std::visit(Visitor{}, spec);
}

namespace detail {

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace detail

/// Materializes the density matrix (n <= kMaxDenseQubits).
inline DenseState to_dense(const StateSpec& spec) {
  const unsigned n = num_qubits(spec);
  if (n > kMaxDenseQubits) {
    throw std::invalid_argument("to_dense: qubit count exceeds dense cap");
  }
  struct Visitor {
    DenseState operator()(const ProductState& s) const {
      const auto& sigma = pauli_matrices();
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
      for (unsigned q = s.num_qubits(); q-- > 0;) {
        const auto& b = s.blochs[q];
        Eigen::Matrix2cd local = 0.5 * (sigma[0] + b[0] * sigma[1] + b[1] * sigma[2] +
                                        b[2] * sigma[3]);
        m = detail::kron(m, local);
      }
      return DenseState{s.num_qubits(), std::move(m)};
    }
    DenseState operator()(const NeedleState& s) const {
      const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << s.num_qubits());
      const double scale = 1.0 / static_cast<double>(dim);
      Eigen::MatrixXcd m =
          scale * (Eigen::MatrixXcd::Identity(dim, dim) + s.eps * pauli_dense_matrix(s.pauli));
      return DenseState{s.num_qubits(), std::move(m)};
    }
    DenseState operator()(const DenseState& s) const { return s; }
  };
  return std::visit(Visitor{}, spec);
}

/// <P> = Tr(rho P) through the cheapest exact path for the representation:
/// O(n) for product states, O(1) for needles, O(2^n) for dense matrices.
inline double expectation(const StateSpec& spec, const PauliString& p) {
  struct Visitor {
    const PauliString& p;
    double operator()(const ProductState& s) const {
      return expectation_product(std::span<const std::array<double, 3>>(s.blochs), p);
    }
    double operator()(const NeedleState& s) const {
      if (s.num_qubits() != p.num_qubits()) {
        throw std::invalid_argument("expectation: qubit counts differ");
      }
      if (p.is_identity()) {
        return 1.0;
      }
      return p == s.pauli ? s.eps : 0.0;
    }
    double operator()(const DenseState& s) const { return expectation_dense(s.matrix, p); }
  };
  return std::visit(Visitor{p}, spec);
}

/// Trace distance ||a - b||_1: the sum of absolute eigenvalues of a - b.
/// Unnormalized, so orthogonal pure states are at distance 2 and the needle
/// state sits exactly at eps from the maximally mixed state.
inline double trace_distance(const DenseState& a, const DenseState& b) {
  if (a.n != b.n) {
    throw std::invalid_argument("trace_distance: qubit counts differ");
  }
  Eigen::MatrixXcd diff = a.matrix - b.matrix;
  diff = (diff + diff.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(diff);
  return solver.eigenvalues().cwiseAbs().sum();
}

inline double trace_distance(const StateSpec& a, const StateSpec& b) {
  return trace_distance(to_dense(a), to_dense(b));
}

enum class HsPath { Dense, Parseval };

/// Squared Hilbert-Schmidt distance ||a - b||_2^2 by either route: a direct
/// Tr((a-b)^2) on dense matrices, or the coefficient sum
/// sum_P (alpha_P - beta_P)^2 / 2^n over all 4^n Pauli words. The two agree
/// to 1e-10 on valid states and feed the norm chain
/// 2^n ||a-b||_2^2 >= ||a-b||_1^2.
inline double hs_distance_sq(const StateSpec& a, const StateSpec& b, HsPath path) {
  const unsigned n = num_qubits(a);
  if (n != num_qubits(b)) {
    throw std::invalid_argument("hs_distance_sq: qubit counts differ");
  }
  if (n > kMaxDenseQubits) {
    throw std::invalid_argument("hs_distance_sq: qubit count exceeds dense cap");
  }
  if (path == HsPath::Dense) {
    const Eigen::MatrixXcd diff = to_dense(a).matrix - to_dense(b).matrix;
    return diff.squaredNorm();  // = Tr(D D^dagger) = Tr(D^2) for Hermitian D
  }
  const std::uint64_t count = pauli_count(n);
  double sum = 0.0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const PauliString p(n, i);
    const double d = expectation(a, p) - expectation(b, p);
    sum += d * d;
  }
  return sum / static_cast<double>(std::uint64_t{1} << n);
}

/// DenseState file format: {"n": int, "re": [[...]], "im": [[...]]} with
/// row-major 2^n x 2^n arrays.
inline DenseState dense_state_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j.contains("re") || !j.contains("im")) {
    throw std::runtime_error("dense state JSON must contain fields n, re, im");
  }
  const unsigned n = j.at("n").get<unsigned>();
  if (n < 1 || n > kMaxDenseQubits) {
    throw std::runtime_error("dense state JSON: n must lie in [1, 8]");
  }
  const auto dim = static_cast<std::size_t>(std::uint64_t{1} << n);
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != dim || im.size() != dim) {
    throw std::runtime_error("dense state JSON: matrix arrays must have 2^n rows");
  }
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    if (re[r].size() != dim || im[r].size() != dim) {
      throw std::runtime_error("dense state JSON: matrix rows must have 2^n entries");
    }
    for (std::size_t c = 0; c < dim; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::complex<double>(re[r][c].get<double>(), im[r][c].get<double>());
    }
  }
  DenseState state{n, std::move(m)};
  if (auto violation = validate(StateSpec{state})) {
    throw std::runtime_error("dense state JSON: " + *violation);
  }
  return state;
}

inline nlohmann::json dense_state_to_json(const DenseState& s) {
  const auto dim = static_cast<std::size_t>(s.matrix.rows());
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (std::size_t r = 0; r < dim; ++r) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (std::size_t c = 0; c < dim; ++c) {
      const auto v = s.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      re_row.push_back(v.real());
      im_row.push_back(v.imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return nlohmann::json{{"n", s.n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline DenseState load_dense_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open dense state file: " + path);
  }
  nlohmann::json j;
  in >> j;
  return dense_state_from_json(j);
}

inline void save_dense_state(const DenseState& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write dense state file: " + path);
  }
  out << dense_state_to_json(s).dump(2) << '\n';
}

}  // namespace qit
