#pragma once

// Brute-force reference constructions shared by the unit tests. Nothing here
// goes through the bitmask Pauli machinery of the library.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <random>
#include <string>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat single(char p) {
  Mat m(2, 2);
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

/// Letter k acts on qubit k = bit k of the basis index, so the Kronecker
/// product runs from the last letter to the first.
inline Mat pauli(const std::string& letters) {
  Mat out = Mat::Identity(1, 1);
  for (char c : letters) out = kron(single(c), out);
  return out;
}

/// Single-mode annihilator |0><1| on qubit j, with Z on every lower qubit.
inline Mat annihilator(int j, int n) {
  Mat a(2, 2);
  a << 0, 1, 0, 0;
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(k < j ? single('Z') : (k == j ? a : single('I')), out);
  return out;
}

inline Mat expm_hermitian(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Vec phases = (es.eigenvalues().cast<cplx>() * cplx(0, -t)).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline Mat random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> g;
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = {g(rng), g(rng)};
  return m;
}

inline Vec random_state(std::mt19937_64& rng, Eigen::Index dim) {
  return random_matrix(rng, dim, 1).col(0).normalized();
}

inline std::string random_letters(std::mt19937_64& rng, int n) {
  static const char kLetters[] = "IXYZ";
  std::uniform_int_distribution<int> pick(0, 3);
  std::string s;
  for (int i = 0; i < n; ++i) s += kLetters[pick(rng)];
  return s;
}

}  // namespace oracle
