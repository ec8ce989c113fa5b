#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qdmd {

using cplx = std::complex<double>;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Tensor product of single-qubit Pauli matrices stored as X/Z bit masks.
///
/// Qubit k corresponds to bit k of a computational-basis index, and to the
/// k-th letter of the string form ("XZI" = X on qubit 0, Z on qubit 1).
/// With P = i^{#Y} X^x Z^z the action on a basis state is
///   P|b> = i^{#Y} (-1)^{popcount(b & z)} |b ^ x>.
class PauliString {
 public:
  static constexpr std::size_t kMaxQubits = 63;

  PauliString() = default;
  explicit PauliString(std::size_t n_qubits);

  /// Parses letters over {I, X, Y, Z}; throws std::invalid_argument otherwise.
  static PauliString parse(std::string_view letters);

  std::size_t n_qubits() const { return n_qubits_; }
  Pauli at(std::size_t qubit) const;
  void set(std::size_t qubit, Pauli p);

  std::uint64_t x_mask() const { return x_; }
  std::uint64_t z_mask() const { return z_; }
  int y_count() const;
  bool is_identity() const { return x_ == 0 && z_ == 0; }
  bool is_diagonal() const { return x_ == 0; }
  bool commutes_with(const PauliString& other) const;

  std::string str() const;

  bool operator==(const PauliString&) const = default;
  bool operator<(const PauliString& other) const;

 private:
  std::uint32_t n_qubits_ = 0;
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

/// Product a*b = phase * c with phase in {1, i, -1, -i}.
std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b);

/// out = P in. Spans must have length 2^n and must not alias.
void apply_pauli(const PauliString& p, std::span<const cplx> in, std::span<cplx> out);

/// <psi|P|psi> without materializing P.
cplx pauli_expectation(const PauliString& p, std::span<const cplx> psi);

/// Dense 2^n x 2^n matrix of a single Pauli string.
Eigen::MatrixXcd dense_pauli(const PauliString& p);

struct PauliTerm {
  double coefficient = 0.0;
  PauliString string;
};

/// Hermitian operator with real Pauli coefficients.
///
/// Construction merges repeated strings (summing coefficients) and drops
/// terms with |c| < kDropTolerance. Merged terms keep the position of the
/// first occurrence, so the input order is the canonical product-formula order.
class QubitHamiltonian {
 public:
  static constexpr double kDropTolerance = 1e-14;

  QubitHamiltonian() = default;
  QubitHamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms, std::string label = {});

  std::size_t n_qubits() const { return n_qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  const std::string& label() const { return label_; }

  Eigen::MatrixXcd dense() const;
  /// <psi|H|psi>, real for a Hermitian operator.
  double expectation(std::span<const cplx> psi) const;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<PauliTerm> terms_;
  std::string label_;
};

/// General operator sum_s c_s P_s with complex coefficients (observables such
/// as c^dag_p c_q are not Hermitian).
class PauliOperator {
 public:
  struct Term {
    cplx coefficient;
    PauliString string;
  };

  PauliOperator() = default;
  explicit PauliOperator(std::size_t n_qubits) : n_qubits_(n_qubits) {}
  PauliOperator(std::size_t n_qubits, std::vector<Term> terms);
  static PauliOperator identity(std::size_t n_qubits);
  static PauliOperator from_string(std::string_view letters, cplx coefficient = 1.0);

  std::size_t n_qubits() const { return n_qubits_; }
  const std::vector<Term>& terms() const { return terms_; }

  PauliOperator& operator+=(const PauliOperator& rhs);
  PauliOperator& operator*=(cplx s);
  friend PauliOperator operator+(PauliOperator a, const PauliOperator& b) { return a += b; }
  friend PauliOperator operator*(cplx s, PauliOperator a) { return a *= s; }
  friend PauliOperator operator*(const PauliOperator& a, const PauliOperator& b);

  PauliOperator adjoint() const;
  cplx expectation(std::span<const cplx> psi) const;
  Eigen::MatrixXcd dense() const;
  /// sqrt(2^n sum |c_s|^2), exact by trace orthogonality of distinct strings.
  double frobenius_norm() const;

 private:
  void merge();

  std::size_t n_qubits_ = 0;
  std::vector<Term> terms_;
};

}  // namespace qdmd
