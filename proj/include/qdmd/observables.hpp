#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "qdmd/lattice_models.hpp"
#include "qdmd/pauli.hpp"
#include "qdmd/snapshot_series.hpp"
#include "qdmd/state_engine.hpp"

namespace qdmd {

/// Operators O_j with labels; row j of a recorded series holds <O_j>.
class ObservableSet {
 public:
  struct Entry {
    std::string label;
    PauliOperator op;
    bool complex_valued = false;
  };

  ObservableSet() = default;
  ObservableSet(std::size_t n_qubits, std::vector<Entry> entries);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<std::string> labels() const;
  /// sqrt(sum_j ||O_j||_F^2)
  double frobenius_norm() const;
  /// Recorder that evaluates every operator through its Pauli expansion.
  Recorder recorder() const;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<Entry> entries_;
};

/// c^dag_{p,s} c_{q,s} as a Pauli sum on 2L qubits.
PauliOperator density_operator(int p, int q, Spin spin, int L);
/// n_{k,s} = (1/L) sum_{p,q} e^{-ik(p-q)} c^dag_p c_q.
PauliOperator momentum_operator(double k, Spin spin, int L);

/// k_j = 2 pi j / L.
double momentum_grid_point(int j, int L);

std::string density_label(int p, int q);  ///< "rho_p_q"
std::string momentum_label(int j);        ///< "nk_j"
std::string correlator_label(int j1, int j2);  ///< "zz_j1_j2"

/// rho_pq for all (p, q) of one spin block.
ObservableSet hubbard_density_set(int L, Spin spin = Spin::Up);
/// n_k for every grid momentum.
ObservableSet hubbard_momentum_set(int L, Spin spin = Spin::Up);
/// <Z_i Z_j> for all i < j.
ObservableSet xxz_correlator_set(int L);

/// Recorder for the Hubbard quench: rho_pq (spin up) followed by n_k derived
/// from rho, which avoids expanding n_k into O(L^2) Pauli strings per step.
Recorder hubbard_recorder(int L);
/// Recorder for the XXZ quench: all zz_i_j with i < j and z_j.
Recorder xxz_recorder(int L);

cplx density_matrix_element(const StateVector& state, int p, int q, Spin spin, int L);
Eigen::MatrixXcd density_matrix(const StateVector& state, Spin spin, int L);
Eigen::VectorXcd measure_set(const StateVector& state, const ObservableSet& obs);

/// Imaginary residual above this is treated as an inconsistent (non-Hermitian) rho.
constexpr double kMomentumImagTolerance = 1e-8;
double momentum_occupation(const Eigen::MatrixXcd& rho, double k);

double spin_correlator(const StateVector& state, int j1, int j2);

struct StandardizedSeries {
  Eigen::MatrixXcd values;
  Eigen::VectorXcd means;
  Eigen::VectorXd stds;  ///< population estimator
  std::vector<std::size_t> skipped_rows;
  std::size_t window = 0;

  bool skipped(std::size_t row) const;
};

/// Rows with std below this are not standardized.
constexpr double kDegenerateSpread = 1e-12;

/// Row-wise (x - mean)/std with mean and population std over the first `window` columns.
StandardizedSeries standardize(const SnapshotSeries& series, std::size_t window);
/// Inverse map; skipped rows return their mean.
Eigen::MatrixXcd destandardize(const StandardizedSeries& s, const Eigen::MatrixXcd& standardized);

/// Adds zero-mean Gaussian noise with std 1/sqrt(shots) to every entry (both
/// parts of complex rows), then clamps each part to [lo, hi]. All built-in
/// observables (rho_pq, n_k, Z, ZZ) lie in [-1, 1].
SnapshotSeries shot_noise_inject(const SnapshotSeries& series, std::uint64_t shots, std::uint64_t seed,
                                 double lo = -1.0, double hi = 1.0);

}  // namespace qdmd
