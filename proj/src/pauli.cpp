#include "qdmd/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

namespace qdmd {
namespace {

constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

cplx i_power(int k) { return kIPow[((k % 4) + 4) % 4]; }

void require_same_width(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": qubit count mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

std::size_t dimension(std::size_t n_qubits) { return std::size_t{1} << n_qubits; }

}  // namespace

PauliString::PauliString(std::size_t n_qubits) : n_qubits_(static_cast<std::uint32_t>(n_qubits)) {
  if (n_qubits > kMaxQubits) {
    throw std::invalid_argument("PauliString: at most 63 qubits supported");
  }
}

PauliString PauliString::parse(std::string_view letters) {
  PauliString p(letters.size());
  for (std::size_t q = 0; q < letters.size(); ++q) {
    switch (letters[q]) {
      case 'I': break;
      case 'X': p.set(q, Pauli::X); break;
      case 'Y': p.set(q, Pauli::Y); break;
      case 'Z': p.set(q, Pauli::Z); break;
      default:
        throw std::invalid_argument("PauliString::parse: unexpected letter '" +
                                    std::string(1, letters[q]) + "'");
    }
  }
  return p;
}

Pauli PauliString::at(std::size_t qubit) const {
  const bool x = (x_ >> qubit) & 1U;
  const bool z = (z_ >> qubit) & 1U;
  if (x && z) return Pauli::Y;
  if (x) return Pauli::X;
  if (z) return Pauli::Z;
  return Pauli::I;
}

void PauliString::set(std::size_t qubit, Pauli p) {
  if (qubit >= n_qubits_) {
    throw std::out_of_range("PauliString::set: qubit " + std::to_string(qubit) + " out of range");
  }
  const std::uint64_t bit = std::uint64_t{1} << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  if (p == Pauli::X || p == Pauli::Y) x_ |= bit;
  if (p == Pauli::Z || p == Pauli::Y) z_ |= bit;
}

int PauliString::y_count() const { return std::popcount(x_ & z_); }

bool PauliString::commutes_with(const PauliString& other) const {
  const int anti = std::popcount(x_ & other.z_) + std::popcount(z_ & other.x_);
  return anti % 2 == 0;
}

std::string PauliString::str() const {
  std::string s(n_qubits_, 'I');
  for (std::size_t q = 0; q < n_qubits_; ++q) {
    s[q] = "IXYZ"[static_cast<int>(at(q))];
  }
  return s;
}

bool PauliString::operator<(const PauliString& other) const {
  if (n_qubits_ != other.n_qubits_) return n_qubits_ < other.n_qubits_;
  if (x_ != other.x_) return x_ < other.x_;
  return z_ < other.z_;
}

std::pair<cplx, PauliString> multiply(const PauliString& a, const PauliString& b) {
  require_same_width(a.n_qubits(), b.n_qubits(), "multiply");
  PauliString c(a.n_qubits());
  const std::uint64_t x = a.x_mask() ^ b.x_mask();
  const std::uint64_t z = a.z_mask() ^ b.z_mask();
  for (std::size_t q = 0; q < a.n_qubits(); ++q) {
    const bool xq = (x >> q) & 1U;
    const bool zq = (z >> q) & 1U;
    c.set(q, xq ? (zq ? Pauli::Y : Pauli::X) : (zq ? Pauli::Z : Pauli::I));
  }
  // a b = i^{ya+yb} (-1)^{|za & xb|} X^x Z^z and X^x Z^z = i^{-yc} c.
  const int sign_flips = std::popcount(a.z_mask() & b.x_mask());
  const int k = a.y_count() + b.y_count() - c.y_count() + 2 * sign_flips;
  return {i_power(k), c};
}

void apply_pauli(const PauliString& p, std::span<const cplx> in, std::span<cplx> out) {
  const std::size_t dim = dimension(p.n_qubits());
  if (in.size() != dim || out.size() != dim) {
    throw std::invalid_argument("apply_pauli: vector length does not match 2^n");
  }
  const cplx phase = i_power(p.y_count());
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  for (std::size_t b = 0; b < dim; ++b) {
    const double sign = (std::popcount(b & z) & 1) ? -1.0 : 1.0;
    out[b ^ x] = phase * sign * in[b];
  }
}

cplx pauli_expectation(const PauliString& p, std::span<const cplx> psi) {
  const std::size_t dim = dimension(p.n_qubits());
  if (psi.size() != dim) {
    throw std::invalid_argument("pauli_expectation: vector length does not match 2^n");
  }
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();
  cplx acc = 0.0;
  for (std::size_t b = 0; b < dim; ++b) {
    const double sign = (std::popcount(b & z) & 1) ? -1.0 : 1.0;
    acc += sign * std::conj(psi[b ^ x]) * psi[b];
  }
  return i_power(p.y_count()) * acc;
}

Eigen::MatrixXcd dense_pauli(const PauliString& p) {
  const std::size_t dim = dimension(p.n_qubits());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const cplx phase = i_power(p.y_count());
  for (std::size_t b = 0; b < dim; ++b) {
    const double sign = (std::popcount(b & p.z_mask()) & 1) ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(b ^ p.x_mask()), static_cast<Eigen::Index>(b)) = phase * sign;
  }
  return m;
}

QubitHamiltonian::QubitHamiltonian(std::size_t n_qubits, std::vector<PauliTerm> terms, std::string label)
    : n_qubits_(n_qubits), label_(std::move(label)) {
  if (n_qubits == 0) throw std::invalid_argument("QubitHamiltonian: n_qubits must be positive");
  std::map<PauliString, std::size_t> position;
  for (auto& t : terms) {
    require_same_width(t.string.n_qubits(), n_qubits, "QubitHamiltonian");
    if (!std::isfinite(t.coefficient)) {
      throw std::invalid_argument("QubitHamiltonian: non-finite coefficient on " + t.string.str());
    }
    auto [it, inserted] = position.try_emplace(t.string, terms_.size());
    if (inserted) {
      terms_.push_back(std::move(t));
    } else {
      terms_[it->second].coefficient += t.coefficient;
    }
  }
  std::erase_if(terms_, [](const PauliTerm& t) { return std::abs(t.coefficient) < kDropTolerance; });
}

Eigen::MatrixXcd QubitHamiltonian::dense() const {
  const auto dim = static_cast<Eigen::Index>(dimension(n_qubits_));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms_) m += t.coefficient * dense_pauli(t.string);
  return m;
}

double QubitHamiltonian::expectation(std::span<const cplx> psi) const {
  double e = 0.0;
  for (const auto& t : terms_) e += t.coefficient * pauli_expectation(t.string, psi).real();
  return e;
}

PauliOperator::PauliOperator(std::size_t n_qubits, std::vector<Term> terms)
    : n_qubits_(n_qubits), terms_(std::move(terms)) {
  for (const auto& t : terms_) require_same_width(t.string.n_qubits(), n_qubits_, "PauliOperator");
  merge();
}

PauliOperator PauliOperator::identity(std::size_t n_qubits) {
  return PauliOperator(n_qubits, {{1.0, PauliString(n_qubits)}});
}

PauliOperator PauliOperator::from_string(std::string_view letters, cplx coefficient) {
  return PauliOperator(letters.size(), {{coefficient, PauliString::parse(letters)}});
}

void PauliOperator::merge() {
  std::map<PauliString, std::size_t> position;
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    auto [it, inserted] = position.try_emplace(t.string, merged.size());
    if (inserted) {
      merged.push_back(std::move(t));
    } else {
      merged[it->second].coefficient += t.coefficient;
    }
  }
  std::erase_if(merged, [](const Term& t) { return std::abs(t.coefficient) < QubitHamiltonian::kDropTolerance; });
  terms_ = std::move(merged);
}

PauliOperator& PauliOperator::operator+=(const PauliOperator& rhs) {
  if (n_qubits_ == 0 && terms_.empty()) n_qubits_ = rhs.n_qubits_;
  require_same_width(n_qubits_, rhs.n_qubits_, "PauliOperator::operator+=");
  terms_.insert(terms_.end(), rhs.terms_.begin(), rhs.terms_.end());
  merge();
  return *this;
}

PauliOperator& PauliOperator::operator*=(cplx s) {
  for (auto& t : terms_) t.coefficient *= s;
  merge();
  return *this;
}

PauliOperator operator*(const PauliOperator& a, const PauliOperator& b) {
  require_same_width(a.n_qubits_, b.n_qubits_, "PauliOperator::operator*");
  std::vector<PauliOperator::Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      auto [phase, s] = multiply(ta.string, tb.string);
      out.push_back({phase * ta.coefficient * tb.coefficient, s});
    }
  }
  return PauliOperator(a.n_qubits_, std::move(out));
}

PauliOperator PauliOperator::adjoint() const {
  PauliOperator r = *this;
  for (auto& t : r.terms_) t.coefficient = std::conj(t.coefficient);
  return r;
}

cplx PauliOperator::expectation(std::span<const cplx> psi) const {
  cplx e = 0.0;
  for (const auto& t : terms_) e += t.coefficient * pauli_expectation(t.string, psi);
  return e;
}

Eigen::MatrixXcd PauliOperator::dense() const {
  const auto dim = static_cast<Eigen::Index>(dimension(n_qubits_));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : terms_) m += t.coefficient * dense_pauli(t.string);
  return m;
}

double PauliOperator::frobenius_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::norm(t.coefficient);
  return std::sqrt(static_cast<double>(dimension(n_qubits_)) * s);
}

}  // namespace qdmd
