#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qdmd/pauli.hpp"

using namespace qdmd;

TEST(PauliString, ParseAndPrintRoundTrip) {
  const auto p = PauliString::parse("XIZYI");
  EXPECT_EQ(p.n_qubits(), 5u);
  EXPECT_EQ(p.str(), "XIZYI");
  EXPECT_EQ(p.at(0), Pauli::X);
  EXPECT_EQ(p.at(3), Pauli::Y);
  EXPECT_EQ(p.y_count(), 1);
  EXPECT_THROW(PauliString::parse("XQ"), std::invalid_argument);
}

TEST(PauliString, DenseMatchesKroneckerProduct) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    const std::string s = oracle::random_letters(rng, 4);
    EXPECT_LT((dense_pauli(PauliString::parse(s)) - oracle::pauli(s)).cwiseAbs().maxCoeff(), 1e-15) << s;
  }
}

TEST(PauliString, ProductPhaseMatchesDense) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string a = oracle::random_letters(rng, 3);
    const std::string b = oracle::random_letters(rng, 3);
    const auto [phase, c] = multiply(PauliString::parse(a), PauliString::parse(b));
    const oracle::Mat expected = oracle::pauli(a) * oracle::pauli(b);
    EXPECT_LT((phase * oracle::pauli(c.str()) - expected).cwiseAbs().maxCoeff(), 1e-14) << a << "*" << b;
  }
}

TEST(PauliString, CommutationMatchesDense) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string a = oracle::random_letters(rng, 3);
    const std::string b = oracle::random_letters(rng, 3);
    const oracle::Mat A = oracle::pauli(a);
    const oracle::Mat B = oracle::pauli(b);
    const bool dense_commute = (A * B - B * A).cwiseAbs().maxCoeff() < 1e-12;
    EXPECT_EQ(PauliString::parse(a).commutes_with(PauliString::parse(b)), dense_commute) << a << "," << b;
  }
}

TEST(PauliString, ApplyAndExpectationMatchDense) {
  std::mt19937_64 rng(4);
  const auto psi = oracle::random_state(rng, 32);
  for (int trial = 0; trial < 30; ++trial) {
    const std::string s = oracle::random_letters(rng, 5);
    Eigen::VectorXcd out(32);
    apply_pauli(PauliString::parse(s), {psi.data(), 32}, {out.data(), 32});
    const oracle::Vec expected = oracle::pauli(s) * psi;
    EXPECT_LT((out - expected).norm(), 1e-13);
    EXPECT_LT(std::abs(pauli_expectation(PauliString::parse(s), {psi.data(), 32}) - psi.dot(expected)), 1e-13);
  }
}

TEST(QubitHamiltonian, MergesDuplicatesAndDropsZeros) {
  const QubitHamiltonian h(2, {{1.0, PauliString::parse("ZI")},
                               {0.5, PauliString::parse("XX")},
                               {-1.0, PauliString::parse("ZI")},
                               {0.25, PauliString::parse("XX")},
                               {2.0, PauliString::parse("IY")}});
  ASSERT_EQ(h.size(), 2u);
  EXPECT_EQ(h.terms()[0].string.str(), "XX");
  EXPECT_DOUBLE_EQ(h.terms()[0].coefficient, 0.75);
  EXPECT_EQ(h.terms()[1].string.str(), "IY");
}

TEST(QubitHamiltonian, DenseIsHermitianAndExpectationAgrees) {
  std::mt19937_64 rng(5);
  std::vector<PauliTerm> terms;
  std::normal_distribution<double> g;
  for (int i = 0; i < 12; ++i) terms.push_back({g(rng), PauliString::parse(oracle::random_letters(rng, 4))});
  const QubitHamiltonian h(4, terms);
  const Eigen::MatrixXcd d = h.dense();
  EXPECT_LT((d - d.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  const auto psi = oracle::random_state(rng, 16);
  EXPECT_NEAR(h.expectation({psi.data(), 16}), psi.dot(d * psi).real(), 1e-12);
}

TEST(QubitHamiltonian, RejectsQubitCountMismatch) {
  EXPECT_THROW(QubitHamiltonian(3, {{1.0, PauliString::parse("ZI")}}), std::invalid_argument);
}

TEST(PauliOperator, AlgebraMatchesDense) {
  std::mt19937_64 rng(6);
  PauliOperator a(3);
  PauliOperator b(3);
  for (int i = 0; i < 5; ++i) {
    a += PauliOperator::from_string(oracle::random_letters(rng, 3), cplx(0.3 * i, -0.1));
    b += PauliOperator::from_string(oracle::random_letters(rng, 3), cplx(1.0, 0.2 * i));
  }
  const Eigen::MatrixXcd A = a.dense();
  const Eigen::MatrixXcd B = b.dense();
  EXPECT_LT(((a * b).dense() - A * B).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT((a.adjoint().dense() - A.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(a.frobenius_norm(), A.norm(), 1e-12);
  const auto psi = oracle::random_state(rng, 8);
  EXPECT_LT(std::abs(a.expectation({psi.data(), 8}) - psi.dot(A * psi)), 1e-13);
}
