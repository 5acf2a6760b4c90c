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

#include "qit/pauli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_helpers.hpp"

using namespace qit;

TEST_CASE("letter encoding matches the base-4 little-endian layout") {
  CHECK(PauliString::from_letters("I").index() == 0);
  CHECK(PauliString::from_letters("I").num_qubits() == 1);
  CHECK(PauliString::from_letters("Z").index() == 3);
  CHECK(PauliString::from_letters("XZ").index() == 7);  // 1*4 + 3
  CHECK(PauliString::from_letters("XZ").letter(1) == PauliLetter::X);
  CHECK(PauliString::from_letters("XZ").letter(0) == PauliLetter::Z);
  CHECK(PauliString(3, 0).is_identity());
  CHECK(PauliString(3, 0).str() == "III");
}

TEST_CASE("letter round trip") {
  SECTION("all words up to n = 3") {
    for (unsigned n = 1; n <= 3; ++n) {
      for (std::uint64_t i = 0; i < pauli_count(n); ++i) {
        const PauliString p(n, i);
        CHECK(PauliString::from_letters(p.str()) == p);
      }
    }
  }
  SECTION("random words up to n = 14") {
    std::mt19937 rng(7);
    static constexpr char kNames[4] = {'I', 'X', 'Y', 'Z'};
    for (int rep = 0; rep < 200; ++rep) {
      const unsigned n = 1 + rng() % 14;
      std::string letters;
      for (unsigned q = 0; q < n; ++q) {
        letters.push_back(kNames[rng() % 4]);
      }
      CHECK(PauliString::from_letters(letters).str() == letters);
    }
  }
}

TEST_CASE("encoding rejects bad input") {
  CHECK_THROWS_AS(PauliString::from_letters(""), std::invalid_argument);
  CHECK_THROWS_AS(PauliString::from_letters("XAZ"), std::invalid_argument);
  CHECK_THROWS_AS(PauliString::from_letters(std::string(15, 'X')), std::invalid_argument);
  CHECK_THROWS_AS(PauliString(2, 16), std::out_of_range);
  CHECK_THROWS_AS(PauliString(0, 0), std::invalid_argument);
}

TEST_CASE("single-qubit matrices are Hermitian, involutory and orthogonal") {
  const auto& sigma = pauli_matrices();
  for (int a = 0; a < 4; ++a) {
    CHECK((sigma[a] - sigma[a].adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(((sigma[a] * sigma[a]) - sigma[0]).cwiseAbs().maxCoeff() == 0.0);
    for (int b = 0; b < 4; ++b) {
      const double expected = a == b ? 2.0 : 0.0;
      CHECK((sigma[a] * sigma[b]).trace().real() == Catch::Approx(expected).margin(1e-15));
    }
  }
}

TEST_CASE("pair trace") {
  CHECK(pauli_pair_trace(PauliString::from_letters("X"), PauliString::from_letters("X")) == 2.0);
  CHECK(pauli_pair_trace(PauliString::from_letters("XZ"), PauliString::from_letters("XZ")) == 4.0);
  CHECK(pauli_pair_trace(PauliString::from_letters("XZ"), PauliString::from_letters("YZ")) == 0.0);
  CHECK_THROWS_AS(
      pauli_pair_trace(PauliString::from_letters("X"), PauliString::from_letters("XX")),
      std::invalid_argument);

  SECTION("agrees with the dense matrix product for every pair up to n = 3") {
    for (unsigned n = 1; n <= 3; ++n) {
      for (std::uint64_t i = 0; i < pauli_count(n); ++i) {
        const auto dense_i = qit_test::naive_pauli_from_index(n, i);
        for (std::uint64_t j = 0; j < pauli_count(n); ++j) {
          const auto dense_j = qit_test::naive_pauli_from_index(n, j);
          const double via_product = (dense_i * dense_j).trace().real();
          const double symbolic = pauli_pair_trace(PauliString(n, i), PauliString(n, j));
          REQUIRE(std::abs(symbolic - via_product) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("dense Pauli matrices match the Kronecker construction") {
  std::mt19937 rng(11);
  for (unsigned n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 8; ++rep) {
      const std::uint64_t index = rng() % pauli_count(n);
      const auto fast = pauli_dense_matrix(PauliString(n, index));
      const auto naive = qit_test::naive_pauli_from_index(n, index);
      REQUIRE((fast - naive).cwiseAbs().maxCoeff() <= 1e-15);
    }
  }
}

TEST_CASE("product-state expectations") {
  const std::array<double, 3> plus_z{0.0, 0.0, 1.0};
  const std::array<double, 3> plus_x{1.0, 0.0, 0.0};

  const std::vector<std::array<double, 3>> one{plus_z};
  CHECK(expectation_product(one, PauliString::from_letters("Z")) == 1.0);
  CHECK(expectation_product(one, PauliString::from_letters("X")) == 0.0);

  const std::vector<std::array<double, 3>> two{plus_z, plus_x};  // qubit0=|0>, qubit1=|+>
  const double fast = expectation_product(two, PauliString::from_letters("XZ"));
  CHECK(fast == 1.0);
  const double naive = qit_test::naive_expectation(qit_test::naive_product_density(two),
                                                   qit_test::naive_pauli("XZ"));
  CHECK(fast == Catch::Approx(naive).margin(1e-12));

  CHECK_THROWS_AS(expectation_product(one, PauliString::from_letters("XZ")),
                  std::invalid_argument);
  const std::vector<std::array<double, 3>> bad{{1.0, 1.0, 1.0}};
  CHECK_THROWS_AS(expectation_product(bad, PauliString::from_letters("Z")), std::domain_error);
}

TEST_CASE("dense expectations") {
  Eigen::MatrixXcd plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;  // |+><+|
  CHECK(expectation_dense(plus, PauliString::from_letters("X")) == Catch::Approx(1.0));

  const Eigen::MatrixXcd mixed = 0.5 * Eigen::MatrixXcd::Identity(2, 2);
  CHECK(expectation_dense(mixed, PauliString::from_letters("Z")) == Catch::Approx(0.0));

  const Eigen::MatrixXcd tilted =
      0.5 * (qit_test::single_pauli('I') + 0.3 * qit_test::single_pauli('Y'));
  CHECK(expectation_dense(tilted, PauliString::from_letters("Y")) ==
        Catch::Approx(0.3).margin(1e-12));

  SECTION("dimension mismatch") {
    CHECK_THROWS_AS(expectation_dense(plus, PauliString::from_letters("XX")),
                    std::invalid_argument);
  }
  SECTION("non-Hermitian input leaves an imaginary residue") {
    Eigen::MatrixXcd skew(2, 2);
    skew << 0, 1, 0, 0;
    CHECK_THROWS_AS(expectation_dense(skew, PauliString::from_letters("Y")), std::domain_error);
  }
}

TEST_CASE("product and dense expectation paths agree on random product states") {
  std::mt19937 rng(2026);
  double worst = 0.0;
  for (unsigned n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 3; ++rep) {
      const auto blochs = qit_test::random_blochs(rng, n);
      const auto rho = qit_test::naive_product_density(blochs);
      for (std::uint64_t i = 0; i < pauli_count(n); ++i) {
        const PauliString p(n, i);
        const double via_product = expectation_product(blochs, p);
        const double via_dense = expectation_dense(rho, p);
        worst = std::max(worst, std::abs(via_product - via_dense));
        REQUIRE(std::abs(via_product) <= 1.0 + 1e-12);
        // Independent O(d^3) route as well.
        const double via_naive =
            qit_test::naive_expectation(rho, qit_test::naive_pauli_from_index(n, i));
        REQUIRE(std::abs(via_dense - via_naive) <= 1e-10);
      }
      // The identity coefficient of any trace-1 state is 1.
      REQUIRE(expectation_product(blochs, PauliString(n, 0)) == 1.0);
    }
  }
  REQUIRE(worst <= 1e-10);
}
