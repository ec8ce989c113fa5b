#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdmd/lattice_models.hpp"
#include "qdmd/pauli.hpp"
#include "qdmd/snapshot_series.hpp"

namespace qdmd {

/// Thrown when a request exceeds a dense or statevector size guard.
class ResourceLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Normalized amplitude vector over 2^n computational basis states.
class StateVector {
 public:
  static constexpr double kNormTolerance = 1e-10;

  StateVector() = default;
  /// Throws std::invalid_argument if the size is not 2^n or the norm is off by more than kNormTolerance.
  StateVector(std::size_t n_qubits, Eigen::VectorXcd amplitudes);
  static StateVector basis_state(std::size_t n_qubits, std::uint64_t index);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return static_cast<std::size_t>(amps_.size()); }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  std::span<const cplx> span() const { return {amps_.data(), dimension()}; }
  std::span<cplx> mutable_span() { return {amps_.data(), dimension()}; }
  double norm() const { return amps_.norm(); }

 private:
  std::size_t n_qubits_ = 0;
  Eigen::VectorXcd amps_;
};

/// First-order product formula: one step applies exp(-i c_j dt P_j) for each
/// term j in term_order.
struct TrotterPlan {
  QubitHamiltonian hamiltonian;
  double dt = 0.0;
  std::vector<std::size_t> term_order;

  /// Term order as constructed (hopping, interaction, chemical potential).
  static TrotterPlan canonical(QubitHamiltonian h, double dt);
  void validate() const;
};

StateVector prepare_domain_wall(int L);

struct GroundState {
  StateVector state;
  double energy = 0.0;
  double gap = 0.0;          ///< second-lowest minus lowest sector eigenvalue
  bool degenerate = false;   ///< gap below kDegeneracyTolerance
  std::size_t sector_dimension = 0;
  static constexpr double kDegeneracyTolerance = 1e-10;
};

/// Ground state of H0 in the half-filled N_up = N_dn = L/2 sector.
GroundState prepare_hubbard_ground_state(const HubbardParams& params);

/// psi <- exp(-i theta P) psi = cos(theta) psi - i sin(theta) P psi.
void apply_pauli_exponential(StateVector& state, const PauliString& p, double theta);
StateVector pauli_exponential(StateVector state, const PauliString& p, double theta);

void trotter_step(StateVector& state, const TrotterPlan& plan);

/// Measures a state into one snapshot column.
struct Recorder {
  std::vector<std::string> labels;
  std::vector<bool> complex_rows;
  std::function<Eigen::VectorXcd(const StateVector&)> measure;
};

/// Records at t = 0 and after each of `steps` Trotter steps (steps + 1 columns).
SnapshotSeries evolve_and_record(StateVector state, const TrotterPlan& plan, std::size_t steps,
                                 const Recorder& recorder);

/// exp(-iHt) via one dense Hermitian eigendecomposition, reused across times.
class ExactPropagator {
 public:
  static constexpr std::size_t kMaxQubits = 14;

  explicit ExactPropagator(const QubitHamiltonian& h);
  StateVector evolve(const StateVector& state, double t) const;
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

 private:
  std::size_t n_qubits_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
};

StateVector exact_evolve(const StateVector& state, const QubitHamiltonian& h, double t);

/// Which exponent to use in the step-count estimate 4 J^2 tau exp(2 sqrt(ln 5) g).
enum class StepBoundReading {
  Literal,  ///< g = ln(J tau / eps)
  SqrtLog,  ///< g = sqrt(ln(J tau / eps))
};

/// Diagnostic upper estimate of the number of exponentials for target error eps.
/// Requires J >= 1, tau > 0, 0 < eps < J tau.
double trotter_step_count_bound(double J, double tau, double eps,
                                StepBoundReading reading = StepBoundReading::Literal);

/// Binary checkpoint: 16-byte header {"QKSV", u32 version, u32 n_qubits, u32 reserved}
/// followed by interleaved little-endian (re, im) doubles.
void write_checkpoint(const std::filesystem::path& path, const StateVector& state);
StateVector read_checkpoint(const std::filesystem::path& path);

}  // namespace qdmd
