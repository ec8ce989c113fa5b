#include "qdmd/state_engine.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <cmath>
#include <fstream>
#include <numeric>

namespace qdmd {

StateVector::StateVector(std::size_t n_qubits, Eigen::VectorXcd amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (n_qubits_ == 0 || n_qubits_ > PauliString::kMaxQubits) {
    throw std::invalid_argument("StateVector: invalid qubit count " + std::to_string(n_qubits_));
  }
  if (static_cast<std::size_t>(amps_.size()) != (std::size_t{1} << n_qubits_)) {
    throw std::invalid_argument("StateVector: amplitude count must be 2^n");
  }
  if (std::abs(amps_.norm() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("StateVector: amplitudes are not normalized (norm " +
                                std::to_string(amps_.norm()) + ")");
  }
}

StateVector StateVector::basis_state(std::size_t n_qubits, std::uint64_t index) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n_qubits));
  if (index >= static_cast<std::uint64_t>(a.size())) throw std::out_of_range("basis_state: index out of range");
  a(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(n_qubits, std::move(a));
}

TrotterPlan TrotterPlan::canonical(QubitHamiltonian h, double dt) {
  TrotterPlan plan{std::move(h), dt, {}};
  plan.term_order.resize(plan.hamiltonian.size());
  std::iota(plan.term_order.begin(), plan.term_order.end(), std::size_t{0});
  plan.validate();
  return plan;
}

void TrotterPlan::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TrotterPlan: dt must be positive");
  if (term_order.size() != hamiltonian.size()) {
    throw std::invalid_argument("TrotterPlan: term_order must list every term exactly once");
  }
  std::vector<bool> seen(term_order.size(), false);
  for (std::size_t idx : term_order) {
    if (idx >= seen.size() || seen[idx]) throw std::invalid_argument("TrotterPlan: term_order is not a permutation");
    seen[idx] = true;
  }
}

StateVector prepare_domain_wall(int L) {
  if (L < 2 || L % 2 != 0) throw std::domain_error("prepare_domain_wall: L must be even and >= 2");
  const auto n = static_cast<std::size_t>(L);
  std::uint64_t index = 0;
  for (std::size_t j = n / 2; j < n; ++j) index |= std::uint64_t{1} << j;  // |1> = spin down
  return StateVector::basis_state(n, index);
}

GroundState prepare_hubbard_ground_state(const HubbardParams& params) {
  params.validate();
  if (params.L % 2 != 0) throw std::domain_error("prepare_hubbard_ground_state: half filling needs even L");
  const QubitHamiltonian h0 = build_hubbard_h0(params);
  const std::size_t n = params.n_qubits();
  const std::size_t dim = std::size_t{1} << n;
  const auto L = static_cast<unsigned>(params.L);
  const std::uint64_t up_mask = (std::uint64_t{1} << L) - 1;

  std::vector<std::uint64_t> basis;
  std::vector<std::int64_t> position(dim, -1);
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (std::popcount(b & up_mask) == static_cast<int>(L / 2) && std::popcount(b >> L) == static_cast<int>(L / 2)) {
      position[b] = static_cast<std::int64_t>(basis.size());
      basis.push_back(b);
    }
  }

  const auto sector = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd hs = Eigen::MatrixXcd::Zero(sector, sector);
  constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  std::map<std::uint64_t, cplx> leak;
  for (Eigen::Index col = 0; col < sector; ++col) {
    const std::uint64_t b = basis[static_cast<std::size_t>(col)];
    leak.clear();
    for (const auto& t : h0.terms()) {
      const std::uint64_t target = b ^ t.string.x_mask();
      const double sign = (std::popcount(b & t.string.z_mask()) & 1) ? -1.0 : 1.0;
      const cplx amp = t.coefficient * sign * kIPow[t.string.y_count() % 4];
      const std::int64_t row = position[target];
      if (row < 0) {
        leak[target] += amp;  // single XZ..ZY strings leave the sector; their sum must not
      } else {
        hs(row, col) += amp;
      }
    }
    for (const auto& [target, amp] : leak) {
      if (std::abs(amp) > 1e-12) {
        throw std::logic_error("prepare_hubbard_ground_state: H0 leaves the particle-number sector");
      }
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hs);
  if (es.info() != Eigen::Success) throw std::runtime_error("prepare_hubbard_ground_state: eigensolver failed");

  Eigen::VectorXcd v = es.eigenvectors().col(0);
  Eigen::Index pivot = 0;
  v.cwiseAbs().maxCoeff(&pivot);
  v *= std::abs(v(pivot)) / v(pivot);  // fix the global phase deterministically

  Eigen::VectorXcd full = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < sector; ++i) full(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(i)])) = v(i);
  full.normalize();

  GroundState gs{StateVector(n, std::move(full)), es.eigenvalues()(0), 0.0, false, basis.size()};
  if (sector > 1) {
    gs.gap = es.eigenvalues()(1) - es.eigenvalues()(0);
    gs.degenerate = gs.gap < GroundState::kDegeneracyTolerance;
  }
  return gs;
}

void apply_pauli_exponential(StateVector& state, const PauliString& p, double theta) {
  if (p.n_qubits() != state.n_qubits()) {
    throw std::domain_error("apply_pauli_exponential: operator acts on " + std::to_string(p.n_qubits()) +
                            " qubits, state has " + std::to_string(state.n_qubits()));
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  auto psi = state.mutable_span();
  const std::size_t dim = psi.size();
  const std::uint64_t x = p.x_mask();
  const std::uint64_t z = p.z_mask();

  if (x == 0) {
    const cplx plus{c, -s};   // eigenvalue +1
    const cplx minus{c, s};   // eigenvalue -1
    for (std::size_t b = 0; b < dim; ++b) psi[b] *= (std::popcount(b & z) & 1) ? minus : plus;
    return;
  }

  constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  // -i sin(theta) * i^{#Y}
  const cplx k = cplx{0.0, -s} * kIPow[p.y_count() % 4];
  const std::uint64_t pivot = x & (~x + 1);
  for (std::size_t b = 0; b < dim; ++b) {
    if (b & pivot) continue;
    const std::size_t bp = b ^ x;
    const double sign_b = (std::popcount(b & z) & 1) ? -1.0 : 1.0;
    const double sign_bp = (std::popcount(bp & z) & 1) ? -1.0 : 1.0;
    const cplx a = psi[b];
    const cplx ap = psi[bp];
    psi[b] = c * a + k * sign_bp * ap;
    psi[bp] = c * ap + k * sign_b * a;
  }
}

StateVector pauli_exponential(StateVector state, const PauliString& p, double theta) {
  apply_pauli_exponential(state, p, theta);
  return state;
}

void trotter_step(StateVector& state, const TrotterPlan& plan) {
  if (plan.hamiltonian.n_qubits() != state.n_qubits()) {
    throw std::domain_error("trotter_step: Hamiltonian and state sizes differ");
  }
  const auto& terms = plan.hamiltonian.terms();
  for (std::size_t idx : plan.term_order) {
    apply_pauli_exponential(state, terms[idx].string, terms[idx].coefficient * plan.dt);
  }
}

SnapshotSeries evolve_and_record(StateVector state, const TrotterPlan& plan, std::size_t steps,
                                 const Recorder& recorder) {
  plan.validate();
  if (plan.hamiltonian.n_qubits() != state.n_qubits()) {
    throw std::domain_error("evolve_and_record: Hamiltonian and state sizes differ");
  }
  SnapshotSeries series;
  series.dt = plan.dt;
  series.labels = recorder.labels;
  series.complex_rows = recorder.complex_rows;
  const auto rows = static_cast<Eigen::Index>(recorder.labels.size());
  series.values.resize(rows, static_cast<Eigen::Index>(steps + 1));

  auto record = [&](std::size_t column) {
    Eigen::VectorXcd v = recorder.measure(state);
    if (v.size() != rows) throw std::runtime_error("evolve_and_record: recorder returned wrong column length");
    series.values.col(static_cast<Eigen::Index>(column)) = v;
  };
  record(0);
  for (std::size_t n = 1; n <= steps; ++n) {
    trotter_step(state, plan);
    record(n);
  }
  return series;
}

ExactPropagator::ExactPropagator(const QubitHamiltonian& h) : n_qubits_(h.n_qubits()) {
  if (n_qubits_ > kMaxQubits) {
    const double bytes = 16.0 * std::ldexp(1.0, 2 * static_cast<int>(n_qubits_));
    throw ResourceLimitError("exact propagation limited to " + std::to_string(kMaxQubits) + " qubits; " +
                             std::to_string(n_qubits_) + " qubits would need a " +
                             std::to_string(bytes / 1e9) + " GB dense matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.dense());
  if (es.info() != Eigen::Success) throw std::runtime_error("ExactPropagator: eigensolver failed");
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
}

StateVector ExactPropagator::evolve(const StateVector& state, double t) const {
  if (state.n_qubits() != n_qubits_) throw std::domain_error("ExactPropagator: state size mismatch");
  Eigen::VectorXcd c = eigenvectors_.adjoint() * state.amplitudes();
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(cplx{0.0, -eigenvalues_(i) * t});
  Eigen::VectorXcd out = eigenvectors_ * c;
  out.normalize();
  return StateVector(n_qubits_, std::move(out));
}

StateVector exact_evolve(const StateVector& state, const QubitHamiltonian& h, double t) {
  return ExactPropagator(h).evolve(state, t);
}

double trotter_step_count_bound(double J, double tau, double eps, StepBoundReading reading) {
  if (!(J >= 1.0)) throw std::domain_error("trotter_step_count_bound: J must be >= 1");
  if (!(tau > 0.0)) throw std::domain_error("trotter_step_count_bound: tau must be positive");
  if (!(eps > 0.0) || !(eps < J * tau)) {
    throw std::domain_error("trotter_step_count_bound: need 0 < eps < J*tau");
  }
  const double log_ratio = std::log(J * tau / eps);
  const double g = reading == StepBoundReading::Literal ? log_ratio : std::sqrt(log_ratio);
  return 4.0 * J * J * tau * std::exp(2.0 * std::sqrt(std::log(5.0)) * g);
}

namespace {

constexpr std::array<char, 4> kMagic = {'Q', 'K', 'S', 'V'};
constexpr std::uint32_t kCheckpointVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFFU));
}

void put_f64(std::ostream& os, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFFU));
}

std::uint64_t get_le(std::istream& is, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = is.get();
    if (c == EOF) throw std::runtime_error("read_checkpoint: truncated file");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const StateVector& state) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(state.n_qubits()));
  put_u32(os, 0);
  for (const cplx& a : state.span()) {
    put_f64(os, a.real());
    put_f64(os, a.imag());
  }
}

StateVector read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error("read_checkpoint: bad magic");
  const auto version = static_cast<std::uint32_t>(get_le(is, 4));
  if (version != kCheckpointVersion) throw std::runtime_error("read_checkpoint: unsupported version");
  const auto n = static_cast<std::size_t>(get_le(is, 4));
  get_le(is, 4);
  if (n == 0 || n > 30) throw std::runtime_error("read_checkpoint: implausible qubit count");
  Eigen::VectorXcd a(static_cast<Eigen::Index>(std::size_t{1} << n));
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double re = std::bit_cast<double>(get_le(is, 8));
    const double im = std::bit_cast<double>(get_le(is, 8));
    a(i) = {re, im};
  }
  return StateVector(n, std::move(a));
}

}  // namespace qdmd
