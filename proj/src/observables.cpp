#include "qdmd/observables.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qdmd {
namespace {

void check_site(int site, int L, const char* what) {
  if (site < 0 || site >= L) {
    throw std::domain_error(std::string(what) + ": site " + std::to_string(site) + " out of range for L=" +
                            std::to_string(L));
  }
}

/// Z string over the orbitals of `spin` below `site`, times (X -/+ iY)/2 on the orbital.
PauliOperator ladder(int site, Spin spin, int L, bool creation) {
  const std::size_t n = 2 * static_cast<std::size_t>(L);
  const std::size_t q = orbital_qubit(site, spin, L);
  const std::size_t block_start = spin == Spin::Up ? 0 : static_cast<std::size_t>(L);
  PauliString x(n);
  PauliString y(n);
  for (std::size_t k = block_start; k < q; ++k) {
    x.set(k, Pauli::Z);
    y.set(k, Pauli::Z);
  }
  x.set(q, Pauli::X);
  y.set(q, Pauli::Y);
  const cplx ycoef = creation ? cplx{0.0, -0.5} : cplx{0.0, 0.5};
  return PauliOperator(n, {{0.5, x}, {ycoef, y}});
}

}  // namespace

ObservableSet::ObservableSet(std::size_t n_qubits, std::vector<Entry> entries)
    : n_qubits_(n_qubits), entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.op.n_qubits() != n_qubits_) {
      throw std::invalid_argument("ObservableSet: operator '" + e.label + "' acts on the wrong qubit count");
    }
  }
}

std::vector<std::string> ObservableSet::labels() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.label);
  return out;
}

double ObservableSet::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += std::pow(e.op.frobenius_norm(), 2);
  return std::sqrt(s);
}

Recorder ObservableSet::recorder() const {
  Recorder r;
  r.labels = labels();
  for (const auto& e : entries_) r.complex_rows.push_back(e.complex_valued);
  r.measure = [set = *this](const StateVector& s) { return measure_set(s, set); };
  return r;
}

PauliOperator density_operator(int p, int q, Spin spin, int L) {
  check_site(p, L, "density_operator");
  check_site(q, L, "density_operator");
  return ladder(p, spin, L, true) * ladder(q, spin, L, false);
}

PauliOperator momentum_operator(double k, Spin spin, int L) {
  PauliOperator op(2 * static_cast<std::size_t>(L));
  for (int p = 0; p < L; ++p) {
    for (int q = 0; q < L; ++q) {
      const cplx phase = std::exp(cplx{0.0, -k * (p - q)}) / static_cast<double>(L);
      op += phase * density_operator(p, q, spin, L);
    }
  }
  return op;
}

double momentum_grid_point(int j, int L) { return 2.0 * std::numbers::pi * j / L; }

std::string density_label(int p, int q) { return "rho_" + std::to_string(p) + "_" + std::to_string(q); }
std::string momentum_label(int j) { return "nk_" + std::to_string(j); }
std::string correlator_label(int j1, int j2) { return "zz_" + std::to_string(j1) + "_" + std::to_string(j2); }

ObservableSet hubbard_density_set(int L, Spin spin) {
  std::vector<ObservableSet::Entry> entries;
  for (int p = 0; p < L; ++p) {
    for (int q = 0; q < L; ++q) entries.push_back({density_label(p, q), density_operator(p, q, spin, L), p != q});
  }
  return ObservableSet(2 * static_cast<std::size_t>(L), std::move(entries));
}

ObservableSet hubbard_momentum_set(int L, Spin spin) {
  std::vector<ObservableSet::Entry> entries;
  for (int j = 0; j < L; ++j) {
    entries.push_back({momentum_label(j), momentum_operator(momentum_grid_point(j, L), spin, L), false});
  }
  return ObservableSet(2 * static_cast<std::size_t>(L), std::move(entries));
}

ObservableSet xxz_correlator_set(int L) {
  const auto n = static_cast<std::size_t>(L);
  std::vector<ObservableSet::Entry> entries;
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      PauliString s(n);
      s.set(static_cast<std::size_t>(i), Pauli::Z);
      s.set(static_cast<std::size_t>(j), Pauli::Z);
      entries.push_back({correlator_label(i, j), PauliOperator(n, {{1.0, s}}), false});
    }
  }
  return ObservableSet(n, std::move(entries));
}

Recorder hubbard_recorder(int L) {
  Recorder r;
  for (int p = 0; p < L; ++p) {
    for (int q = 0; q < L; ++q) {
      r.labels.push_back(density_label(p, q));
      r.complex_rows.push_back(p != q);
    }
  }
  for (int j = 0; j < L; ++j) {
    r.labels.push_back(momentum_label(j));
    r.complex_rows.push_back(false);
  }
  const ObservableSet rho_ops = hubbard_density_set(L, Spin::Up);
  r.measure = [rho_ops, L](const StateVector& s) {
    const Eigen::VectorXcd flat = measure_set(s, rho_ops);
    Eigen::MatrixXcd rho(L, L);
    for (int p = 0; p < L; ++p) {
      for (int q = 0; q < L; ++q) rho(p, q) = flat(p * L + q);
    }
    Eigen::VectorXcd out(L * L + L);
    out.head(L * L) = flat;
    for (int j = 0; j < L; ++j) out(L * L + j) = momentum_occupation(rho, momentum_grid_point(j, L));
    return out;
  };
  return r;
}

Recorder xxz_recorder(int L) {
  Recorder r;
  for (int i = 0; i < L; ++i) {
    for (int j = i + 1; j < L; ++j) {
      r.labels.push_back(correlator_label(i, j));
      r.complex_rows.push_back(false);
    }
  }
  for (int j = 0; j < L; ++j) {
    r.labels.push_back("z_" + std::to_string(j));
    r.complex_rows.push_back(false);
  }
  r.measure = [L](const StateVector& s) {
    // Diagonal observables: accumulate probabilities once per basis state.
    const auto psi = s.span();
    const int pairs = L * (L - 1) / 2;
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(pairs + L);
    std::vector<double> zz(static_cast<std::size_t>(pairs), 0.0);
    std::vector<double> z(static_cast<std::size_t>(L), 0.0);
    for (std::size_t b = 0; b < psi.size(); ++b) {
      const double prob = std::norm(psi[b]);
      if (prob == 0.0) continue;
      int idx = 0;
      for (int i = 0; i < L; ++i) {
        const double si = ((b >> i) & 1U) ? -1.0 : 1.0;
        z[static_cast<std::size_t>(i)] += si * prob;
        for (int j = i + 1; j < L; ++j, ++idx) {
          const double sj = ((b >> j) & 1U) ? -1.0 : 1.0;
          zz[static_cast<std::size_t>(idx)] += si * sj * prob;
        }
      }
    }
    for (int i = 0; i < pairs; ++i) out(i) = zz[static_cast<std::size_t>(i)];
    for (int j = 0; j < L; ++j) out(pairs + j) = z[static_cast<std::size_t>(j)];
    return out;
  };
  return r;
}

cplx density_matrix_element(const StateVector& state, int p, int q, Spin spin, int L) {
  if (state.n_qubits() != 2 * static_cast<std::size_t>(L)) {
    throw std::domain_error("density_matrix_element: state does not hold 2L qubits");
  }
  return density_operator(p, q, spin, L).expectation(state.span());
}

Eigen::MatrixXcd density_matrix(const StateVector& state, Spin spin, int L) {
  Eigen::MatrixXcd rho(L, L);
  for (int p = 0; p < L; ++p) {
    for (int q = 0; q < L; ++q) rho(p, q) = density_matrix_element(state, p, q, spin, L);
  }
  return rho;
}

Eigen::VectorXcd measure_set(const StateVector& state, const ObservableSet& obs) {
  if (obs.n_qubits() != state.n_qubits()) throw std::domain_error("measure_set: qubit count mismatch");
  Eigen::VectorXcd out(static_cast<Eigen::Index>(obs.size()));
  for (std::size_t j = 0; j < obs.size(); ++j) {
    const auto& e = obs.entries()[j];
    cplx v = e.op.expectation(state.span());
    if (!e.complex_valued) v = v.real();
    out(static_cast<Eigen::Index>(j)) = v;
  }
  return out;
}

double momentum_occupation(const Eigen::MatrixXcd& rho, double k) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) throw std::invalid_argument("momentum_occupation: rho must be square");
  const auto L = rho.rows();
  cplx acc = 0.0;
  for (Eigen::Index p = 0; p < L; ++p) {
    for (Eigen::Index q = 0; q < L; ++q) acc += rho(p, q) * std::exp(cplx{0.0, -k * static_cast<double>(p - q)});
  }
  acc /= static_cast<double>(L);
  if (std::abs(acc.imag()) > kMomentumImagTolerance) {
    throw std::runtime_error("momentum_occupation: imaginary residual " + std::to_string(acc.imag()) +
                             " indicates a non-Hermitian density matrix");
  }
  return acc.real();
}

double spin_correlator(const StateVector& state, int j1, int j2) {
  const int L = static_cast<int>(state.n_qubits());
  check_site(j1, L, "spin_correlator");
  check_site(j2, L, "spin_correlator");
  if (j1 == j2) throw std::domain_error("spin_correlator: j1 == j2");
  const std::uint64_t mask = (std::uint64_t{1} << j1) | (std::uint64_t{1} << j2);
  double acc = 0.0;
  const auto psi = state.span();
  for (std::size_t b = 0; b < psi.size(); ++b) acc += (std::popcount(b & mask) & 1 ? -1.0 : 1.0) * std::norm(psi[b]);
  return acc;
}

bool StandardizedSeries::skipped(std::size_t row) const {
  return std::find(skipped_rows.begin(), skipped_rows.end(), row) != skipped_rows.end();
}

StandardizedSeries standardize(const SnapshotSeries& series, std::size_t window) {
  if (window < 2) throw std::domain_error("standardize: window must hold at least 2 columns");
  if (window > series.columns()) {
    throw std::domain_error("standardize: window of " + std::to_string(window) + " exceeds " +
                            std::to_string(series.columns()) + " columns");
  }
  const auto rows = series.values.rows();
  const auto m = static_cast<Eigen::Index>(window);
  StandardizedSeries s;
  s.window = window;
  s.means.resize(rows);
  s.stds.resize(rows);
  s.values.resize(rows, series.values.cols());
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto fit = series.values.row(i).head(m);
    const cplx mean = fit.mean();
    const double var = (fit.array() - mean).abs2().sum() / static_cast<double>(m);
    const double sd = std::sqrt(var);
    s.means(i) = mean;
    s.stds(i) = sd;
    if (sd < kDegenerateSpread) {
      s.skipped_rows.push_back(static_cast<std::size_t>(i));
      s.values.row(i).setZero();
    } else {
      s.values.row(i) = (series.values.row(i).array() - mean) / sd;
    }
  }
  return s;
}

Eigen::MatrixXcd destandardize(const StandardizedSeries& s, const Eigen::MatrixXcd& standardized) {
  if (standardized.rows() != s.means.size()) throw std::invalid_argument("destandardize: row count mismatch");
  Eigen::MatrixXcd out(standardized.rows(), standardized.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    if (s.skipped(static_cast<std::size_t>(i))) {
      out.row(i).setConstant(s.means(i));
    } else {
      out.row(i) = standardized.row(i).array() * s.stds(i) + s.means(i);
    }
  }
  return out;
}

SnapshotSeries shot_noise_inject(const SnapshotSeries& series, std::uint64_t shots, std::uint64_t seed, double lo,
                                 double hi) {
  if (shots < 1) throw std::domain_error("shot_noise_inject: shots must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0 / std::sqrt(static_cast<double>(shots)));
  SnapshotSeries out = series;
  for (Eigen::Index n = 0; n < out.values.cols(); ++n) {
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
      cplx& v = out.values(i, n);
      const double re = std::clamp(v.real() + noise(rng), lo, hi);
      double im = v.imag();
      if (out.complex_rows[static_cast<std::size_t>(i)]) im = std::clamp(im + noise(rng), lo, hi);
      v = {re, im};
    }
  }
  return out;
}

}  // namespace qdmd
