#include "qdmd/lattice_models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qdmd {
namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

PauliString single(std::size_t n_qubits, std::size_t qubit, Pauli p) {
  PauliString s(n_qubits);
  s.set(qubit, p);
  return s;
}

void append(std::vector<PauliTerm>& dst, const std::vector<PauliTerm>& src, double scale) {
  for (const auto& t : src) dst.push_back({scale * t.coefficient, t.string});
}

}  // namespace

HubbardParams HubbardParams::particle_hole_symmetric(int L, double tau0, double tau1, double U) {
  return HubbardParams{L, tau0, tau1, U, U / 2.0};
}

void HubbardParams::validate() const {
  if (L < 2) throw std::domain_error("HubbardParams: L must be >= 2, got " + std::to_string(L));
  if (2 * L > static_cast<int>(PauliString::kMaxQubits)) throw std::domain_error("HubbardParams: L too large");
  require_finite(tau0, "tau0");
  require_finite(tau1, "tau1");
  require_finite(U, "U");
  require_finite(mu, "mu");
}

void XXZParams::validate() const {
  if (L < 2) throw std::domain_error("XXZParams: L must be >= 2, got " + std::to_string(L));
  if (L > static_cast<int>(PauliString::kMaxQubits)) throw std::domain_error("XXZParams: L too large");
  require_finite(U, "U");
  require_finite(h, "h");
}

std::size_t orbital_qubit(int site, Spin spin, int L) {
  if (L < 1 || site < 0 || site >= L) {
    throw std::domain_error("site " + std::to_string(site) + " out of range for L=" + std::to_string(L));
  }
  return static_cast<std::size_t>(site + (spin == Spin::Down ? L : 0));
}

std::vector<PauliTerm> jordan_wigner_hopping(int p, int q, Spin spin, int L) {
  if (p == q) throw std::domain_error("jordan_wigner_hopping: p == q");
  if (p > q) throw std::domain_error("jordan_wigner_hopping: requires p < q");
  const std::size_t n = 2 * static_cast<std::size_t>(L);
  const std::size_t qp = orbital_qubit(p, spin, L);
  const std::size_t qq = orbital_qubit(q, spin, L);
  PauliString xx(n);
  PauliString yy(n);
  xx.set(qp, Pauli::X);
  xx.set(qq, Pauli::X);
  yy.set(qp, Pauli::Y);
  yy.set(qq, Pauli::Y);
  for (std::size_t k = qp + 1; k < qq; ++k) {
    xx.set(k, Pauli::Z);
    yy.set(k, Pauli::Z);
  }
  return {{0.5, xx}, {0.5, yy}};
}

std::vector<PauliTerm> jordan_wigner_number(int j, Spin spin, int L) {
  const std::size_t n = 2 * static_cast<std::size_t>(L);
  const std::size_t qj = orbital_qubit(j, spin, L);
  return {{0.5, PauliString(n)}, {-0.5, single(n, qj, Pauli::Z)}};
}

namespace {

std::vector<PauliTerm> hopping_terms(int L, double amplitude) {
  std::vector<PauliTerm> terms;
  for (int bond = 0; bond + 1 < L; ++bond) {
    for (Spin s : {Spin::Up, Spin::Down}) {
      append(terms, jordan_wigner_hopping(bond, bond + 1, s, L), -amplitude);
    }
  }
  return terms;
}

}  // namespace

QubitHamiltonian build_hubbard_h0(const HubbardParams& params) {
  params.validate();
  return QubitHamiltonian(params.n_qubits(), hopping_terms(params.L, params.tau0), "hubbard_h0");
}

QubitHamiltonian build_hubbard_h1(const HubbardParams& params) {
  params.validate();
  const int L = params.L;
  const std::size_t n = params.n_qubits();
  std::vector<PauliTerm> terms = hopping_terms(L, params.tau1);

  // U n_up n_dn = U/4 (I - Z_up - Z_dn + Z_up Z_dn)
  for (int j = 0; j < L; ++j) {
    const std::size_t up = orbital_qubit(j, Spin::Up, L);
    const std::size_t dn = orbital_qubit(j, Spin::Down, L);
    PauliString zz(n);
    zz.set(up, Pauli::Z);
    zz.set(dn, Pauli::Z);
    terms.push_back({params.U / 4.0, zz});
    terms.push_back({params.U / 4.0, PauliString(n)});
    terms.push_back({-params.U / 4.0, single(n, up, Pauli::Z)});
    terms.push_back({-params.U / 4.0, single(n, dn, Pauli::Z)});
  }
  for (Spin s : {Spin::Up, Spin::Down}) {
    for (int j = 0; j < L; ++j) append(terms, jordan_wigner_number(j, s, L), -params.mu);
  }
  return QubitHamiltonian(n, std::move(terms), "hubbard_h1");
}

QubitHamiltonian build_xxz(const XXZParams& params) {
  params.validate();
  const std::size_t n = params.n_qubits();
  std::vector<PauliTerm> terms;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    for (Pauli p : {Pauli::X, Pauli::Y}) {
      PauliString s(n);
      s.set(j, p);
      s.set(j + 1, p);
      terms.push_back({-1.0, s});
    }
  }
  for (std::size_t j = 0; j + 1 < n; ++j) {
    PauliString s(n);
    s.set(j, Pauli::Z);
    s.set(j + 1, Pauli::Z);
    terms.push_back({params.U, s});
  }
  for (std::size_t j = 0; j < n; ++j) terms.push_back({params.h, single(n, j, Pauli::Z)});
  return QubitHamiltonian(n, std::move(terms), "xxz");
}

QubitHamiltonian hubbard_number_operator(int L) {
  std::vector<PauliTerm> terms;
  for (Spin s : {Spin::Up, Spin::Down}) {
    for (int j = 0; j < L; ++j) append(terms, jordan_wigner_number(j, s, L), 1.0);
  }
  return QubitHamiltonian(2 * static_cast<std::size_t>(L), std::move(terms), "total_number");
}

QubitHamiltonian total_z(int L) {
  const auto n = static_cast<std::size_t>(L);
  std::vector<PauliTerm> terms;
  for (std::size_t j = 0; j < n; ++j) terms.push_back({1.0, single(n, j, Pauli::Z)});
  return QubitHamiltonian(n, std::move(terms), "total_z");
}

double frobenius_norm(const QubitHamiltonian& h) {
  double s = 0.0;
  for (const auto& t : h.terms()) s += t.coefficient * t.coefficient;
  return std::sqrt(std::ldexp(s, static_cast<int>(h.n_qubits())));
}

nlohmann::json to_json(const QubitHamiltonian& h) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : h.terms()) terms.push_back({{"coeff", t.coefficient}, {"string", t.string.str()}});
  return {{"label", h.label()}, {"n_qubits", h.n_qubits()}, {"terms", std::move(terms)}};
}

QubitHamiltonian hamiltonian_from_json(const nlohmann::json& j) {
  const auto n = j.at("n_qubits").get<std::size_t>();
  std::vector<PauliTerm> terms;
  for (const auto& t : j.at("terms")) {
    terms.push_back({t.at("coeff").get<double>(), PauliString::parse(t.at("string").get<std::string>())});
  }
  return QubitHamiltonian(n, std::move(terms), j.value("label", std::string{}));
}

}  // namespace qdmd
