#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <vector>

#include "qdmd/pauli.hpp"

namespace qdmd {

enum class Spin { Up, Down };

/// Fermi-Hubbard chain with open boundaries, quenched from hopping tau0 to
/// tau1 with on-site U and chemical potential mu.
///
/// Qubits 0..L-1 hold the spin-up orbitals of sites 0..L-1 and qubits
/// L..2L-1 the spin-down orbitals. Basis state |1> means occupied, so
/// n = (I - Z)/2.
struct HubbardParams {
  int L = 6;
  double tau0 = 1.0;
  double tau1 = 0.1;
  double U = 4.0;
  double mu = 2.0;

  /// mu = U/2.
  static HubbardParams particle_hole_symmetric(int L, double tau0, double tau1, double U);
  std::size_t n_qubits() const { return 2 * static_cast<std::size_t>(L); }
  void validate() const;
};

/// -sum (X_j X_{j+1} + Y_j Y_{j+1}) + U sum Z_j Z_{j+1} + h sum Z_j, open chain.
struct XXZParams {
  int L = 6;
  double U = 4.0;
  double h = 0.1;

  std::size_t n_qubits() const { return static_cast<std::size_t>(L); }
  void validate() const;
};

std::size_t orbital_qubit(int site, Spin spin, int L);

/// c^dag_{p,s} c_{q,s} + h.c. for p < q as (X Z..Z X + Y Z..Z Y)/2 on 2L qubits.
std::vector<PauliTerm> jordan_wigner_hopping(int p, int q, Spin spin, int L);

/// n_{j,s} = (I - Z)/2 on 2L qubits.
std::vector<PauliTerm> jordan_wigner_number(int j, Spin spin, int L);

QubitHamiltonian build_hubbard_h0(const HubbardParams& params);
QubitHamiltonian build_hubbard_h1(const HubbardParams& params);
QubitHamiltonian build_xxz(const XXZParams& params);

/// Total particle number sum_{j,s} n_{j,s}.
QubitHamiltonian hubbard_number_operator(int L);
/// Total magnetization sum_j Z_j.
QubitHamiltonian total_z(int L);

double frobenius_norm(const QubitHamiltonian& h);

nlohmann::json to_json(const QubitHamiltonian& h);
QubitHamiltonian hamiltonian_from_json(const nlohmann::json& j);

}  // namespace qdmd
