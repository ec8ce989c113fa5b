#include "qdmd/verify.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "qdmd/dmd.hpp"
#include "qdmd/error_analysis.hpp"
#include "qdmd/ihodmd.hpp"
#include "qdmd/lattice_models.hpp"
#include "qdmd/observables.hpp"
#include "qdmd/state_engine.hpp"

namespace qdmd {
namespace {

using Rng = std::mt19937_64;

PropertyResult check(std::string name, double measured, double tolerance, std::string detail = {}) {
  return {std::move(name), measured <= tolerance, measured, tolerance, std::move(detail)};
}

/// Annihilator on mode j with the sign (-1)^{occupied modes below j}, built
/// directly on occupation-number basis states.
Eigen::MatrixXcd dense_annihilator(std::size_t j, std::size_t modes) {
  const std::size_t dim = std::size_t{1} << modes;
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const std::uint64_t below = (std::uint64_t{1} << j) - 1;
  for (std::uint64_t b = 0; b < dim; ++b) {
    if (!((b >> j) & 1U)) continue;
    const double sign = (std::popcount(b & below) & 1) ? -1.0 : 1.0;
    c(static_cast<Eigen::Index>(b ^ (std::uint64_t{1} << j)), static_cast<Eigen::Index>(b)) = sign;
  }
  return c;
}

Eigen::MatrixXcd dense_hubbard_h1(const HubbardParams& p) {
  const std::size_t modes = p.n_qubits();
  std::vector<Eigen::MatrixXcd> c;
  for (std::size_t k = 0; k < modes; ++k) c.push_back(dense_annihilator(k, modes));
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << modes);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const auto L = static_cast<std::size_t>(p.L);
  for (std::size_t block : {std::size_t{0}, L}) {
    for (std::size_t j = 0; j + 1 < L; ++j) {
      const auto& a = c[block + j];
      const auto& b = c[block + j + 1];
      h -= p.tau1 * (a.adjoint() * b + b.adjoint() * a);
    }
    for (std::size_t j = 0; j < L; ++j) h -= p.mu * c[block + j].adjoint() * c[block + j];
  }
  for (std::size_t j = 0; j < L; ++j) {
    h += p.U * (c[j].adjoint() * c[j]) * (c[L + j].adjoint() * c[L + j]);
  }
  return h;
}

Eigen::MatrixXcd dense_from_terms(std::size_t n, const std::vector<PauliTerm>& terms) {
  return QubitHamiltonian(n, terms).dense();
}

std::vector<PauliTerm> maybe_mutate(std::vector<PauliTerm> terms, bool mutate) {
  if (!mutate) return terms;
  for (auto& t : terms) {
    if (t.string.y_count() > 0) t.coefficient = -t.coefficient;
  }
  return terms;
}

PropertyResult jw_oracle(bool mutate) {
  double worst = 0.0;
  for (int L : {2, 3, 4}) {
    const HubbardParams p = HubbardParams::particle_hole_symmetric(L, 1.0, 0.3, 4.0);
    const std::size_t n = p.n_qubits();
    // every hopping pair, so that long Z strings are exercised
    for (Spin s : {Spin::Up, Spin::Down}) {
      for (int a = 0; a < L; ++a) {
        for (int b = a + 1; b < L; ++b) {
          const auto ca = dense_annihilator(orbital_qubit(a, s, L), n);
          const auto cb = dense_annihilator(orbital_qubit(b, s, L), n);
          const Eigen::MatrixXcd oracle = ca.adjoint() * cb + cb.adjoint() * ca;
          const Eigen::MatrixXcd jw = dense_from_terms(n, maybe_mutate(jordan_wigner_hopping(a, b, s, L), mutate));
          worst = std::max(worst, (oracle - jw).cwiseAbs().maxCoeff());
          const Eigen::MatrixXcd rho = density_operator(a, b, s, L).dense();
          worst = std::max(worst, (rho - ca.adjoint() * cb).cwiseAbs().maxCoeff());
        }
      }
    }
    const QubitHamiltonian h1 = build_hubbard_h1(p);
    const Eigen::MatrixXcd jw_h = dense_from_terms(n, maybe_mutate(h1.terms(), mutate));
    worst = std::max(worst, (jw_h - dense_hubbard_h1(p)).cwiseAbs().maxCoeff());
  }
  return check(mutate ? "jw_dense_oracle[mutated]" : "jw_dense_oracle", worst, 1e-12,
               "max |entry| difference, Hubbard L = 2..4");
}

PropertyResult norm_conservation(double* number_drift, double* sz_drift) {
  const HubbardParams p;  // L = 6, 12 qubits
  const GroundState gs = prepare_hubbard_ground_state(p);
  const TrotterPlan plan = TrotterPlan::canonical(build_hubbard_h1(p), 0.01);
  const QubitHamiltonian number = hubbard_number_operator(p.L);
  std::vector<PauliTerm> sz_terms;
  for (int j = 0; j < p.L; ++j) {
    for (const auto& t : jordan_wigner_number(j, Spin::Up, p.L)) sz_terms.push_back(t);
    for (auto t : jordan_wigner_number(j, Spin::Down, p.L)) {
      t.coefficient = -t.coefficient;
      sz_terms.push_back(t);
    }
  }
  const QubitHamiltonian sz(p.n_qubits(), sz_terms);
  StateVector psi = gs.state;
  const double n0 = number.expectation(psi.span());
  const double s0 = sz.expectation(psi.span());
  double worst_norm = 0.0;
  *number_drift = 0.0;
  *sz_drift = 0.0;
  for (int step = 1; step <= 1000; ++step) {
    trotter_step(psi, plan);
    if (step % 100 == 0) {
      worst_norm = std::max(worst_norm, std::abs(psi.norm() - 1.0));
      *number_drift = std::max(*number_drift, std::abs(number.expectation(psi.span()) - n0));
      *sz_drift = std::max(*sz_drift, std::abs(sz.expectation(psi.span()) - s0));
    }
  }
  return check("norm_conservation", worst_norm, 1e-10, "| ||psi|| - 1 | over 1000 Hubbard L=6 steps");
}

PropertyResult magnetization_conservation() {
  const XXZParams p{8, 4.0, 0.1};
  const TrotterPlan plan = TrotterPlan::canonical(build_xxz(p), 0.01);
  const QubitHamiltonian mz = total_z(p.L);
  StateVector psi = prepare_domain_wall(p.L);
  const double m0 = mz.expectation(psi.span());
  double worst = 0.0;
  for (int step = 1; step <= 1000; ++step) {
    trotter_step(psi, plan);
    if (step % 100 == 0) worst = std::max(worst, std::abs(mz.expectation(psi.span()) - m0));
  }
  return check("xxz_magnetization_conservation", worst, 1e-10, "|<sum Z>(t) - <sum Z>(0)|, XXZ L=8, 1000 steps");
}

PropertyResult frobenius_identity() {
  double worst = 0.0;
  auto rel = [&](double fast, const Eigen::MatrixXcd& dense) {
    worst = std::max(worst, std::abs(fast - dense.norm()) / dense.norm());
  };
  for (int L : {2, 3}) {
    const HubbardParams p = HubbardParams::particle_hole_symmetric(L, 1.0, 0.1, 4.0);
    rel(frobenius_norm(build_hubbard_h1(p)), build_hubbard_h1(p).dense());
    rel(frobenius_norm(build_hubbard_h0(p)), build_hubbard_h0(p).dense());
    const auto nk = momentum_operator(momentum_grid_point(1, L), Spin::Up, L);
    rel(nk.frobenius_norm(), nk.dense());
  }
  for (int L : {4, 6}) {
    const QubitHamiltonian h = build_xxz({L, 4.0, 0.1});
    rel(frobenius_norm(h), h.dense());
  }
  return check("frobenius_identity", worst, 1e-10, "relative difference to the dense Frobenius norm");
}

Eigen::MatrixXcd random_matrix(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = {g(rng), g(rng)};
  return m;
}

Eigen::VectorXcd random_unit(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v.normalized();
}

PropertyResult lemma_draws(Rng& rng, std::size_t draws) {
  std::size_t failures = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    Eigen::MatrixXcd o = random_matrix(rng, 16);
    if (i % 2 == 0) o = (o + o.adjoint()).eval();  // Hermitian half
    if (!lemma_a_check(o, random_unit(rng, 16)).pass) ++failures;
  }
  return check("lemma_a_random", static_cast<double>(failures), 0.0, fmt::format("{} draws, N = 16", draws));
}

PropertyResult commutator_draws(Rng& rng, std::size_t draws) {
  std::size_t failures = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    if (!commutator_frobenius_check(random_matrix(rng, 16), random_matrix(rng, 16)).pass) ++failures;
  }
  return check("commutator_frobenius_random", static_cast<double>(failures), 0.0,
               fmt::format("{} draws, N = 16", draws));
}

PropertyResult delay_index_oracle(Rng& rng, std::size_t draws) {
  std::uniform_int_distribution<std::size_t> small(1, 12);
  std::size_t mismatches = 0;
  for (std::size_t d = 0; d < draws; ++d) {
    const EmbeddingParams p{small(rng), small(rng), small(rng)};
    const std::size_t m = p.min_window() + std::uniform_int_distribution<std::size_t>(0, 60)(rng);
    std::vector<cplx> row(m);
    for (std::size_t k = 0; k < m; ++k) row[k] = {static_cast<double>(k + 1), -static_cast<double>(k + 1)};
    const DataMatrices dm = build_delay_matrices(row, p, m, 0.01);
    const std::size_t expected_cols = (m - p.n_s - p.tau) / p.n_g + 1;
    if (static_cast<std::size_t>(dm.X1.cols()) != expected_cols) ++mismatches;
    // one-based reading: X1(i, l) = O^{(l-1) n_g + i}, X2 adds tau
    for (std::size_t l = 1; l <= expected_cols; ++l) {
      for (std::size_t i = 1; i <= p.n_s; ++i) {
        const std::size_t k1 = (l - 1) * p.n_g + i;
        const auto r = static_cast<Eigen::Index>(i - 1);
        const auto c = static_cast<Eigen::Index>(l - 1);
        if (dm.X1(r, c) != row[k1 - 1]) ++mismatches;
        if (dm.X2(r, c) != row[k1 + p.tau - 1]) ++mismatches;
      }
    }
  }
  return check("delay_index_oracle", static_cast<double>(mismatches), 0.0,
               fmt::format("{} random embeddings", draws));
}

PropertyResult ihodmd_reduction() {
  // iHODMD(1,1,1) on one row against scalar DMD of the same standardized row
  const std::size_t count = 120;
  SnapshotSeries s;
  s.dt = 0.05;
  s.labels = {"x"};
  s.complex_rows = {true};
  s.values.resize(1, static_cast<Eigen::Index>(count));
  for (std::size_t n = 0; n < count; ++n) {
    const double t = s.dt * static_cast<double>(n);
    s.values(0, static_cast<Eigen::Index>(n)) = std::exp(cplx(-0.2, 1.3) * t) + 0.4;
  }
  const IHODMDModel model = fit_ihodmd(s, count, {1, 1, 1});
  const StandardizedSeries z = standardize(s, count);
  const DmdModel scalar = fit_dmd(build_data_matrices(z.values, s.dt, count));
  const double diff = (model.rows[0].model->eigenvalues - scalar.eigenvalues).cwiseAbs().maxCoeff();
  return check("ihodmd_111_matches_scalar_dmd", diff, 1e-12, "|Lambda difference|");
}

PropertyResult synthetic_dmd(Rng& rng) {
  // x_{n+1} = A x_n with A = S diag(lambda) S^-1, N = 8, only four modes excited
  const Eigen::Index N = 8;
  Eigen::VectorXcd lambda(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    lambda(k) = std::polar(0.9 + 0.01 * static_cast<double>(k), 0.3 * static_cast<double>(k + 1));
  }
  const Eigen::MatrixXcd S = random_matrix(rng, N);
  Eigen::VectorXcd coeff = Eigen::VectorXcd::Zero(N);
  for (Eigen::Index k = 0; k < 4; ++k) coeff(k) = {1.0 + 0.5 * static_cast<double>(k), 0.3};
  const std::size_t m = 50;
  Eigen::MatrixXcd X(N, 2 * static_cast<Eigen::Index>(m));
  for (Eigen::Index n = 0; n < X.cols(); ++n) {
    X.col(n) = S * (lambda.array().pow(static_cast<double>(n)) * coeff.array()).matrix();
  }
  const DmdModel model = fit_dmd(build_data_matrices(X.leftCols(static_cast<Eigen::Index>(m)), 1.0, m));
  double eig_err = 0.0;
  for (Eigen::Index k = 0; k < 4; ++k) {
    eig_err = std::max(eig_err, (model.eigenvalues.array() - lambda(k)).abs().minCoeff());
  }
  double pred_err = 0.0;
  for (Eigen::Index n = 0; n < X.cols(); ++n) {
    pred_err = std::max(pred_err, (predict(model, static_cast<double>(n)) - X.col(n)).norm() / X.col(n).norm());
  }
  return check("synthetic_dmd_exactness", std::max(eig_err / 1e-8, pred_err / 1e-6), 1.0,
               fmt::format("rank {}, eigenvalue error {:.2e} (tol 1e-8), relative prediction error {:.2e} (tol 1e-6)",
                           model.rank, eig_err, pred_err));
}

}  // namespace

bool VerifyReport::pass() const {
  return std::all_of(results.begin(), results.end(), [](const PropertyResult& r) { return r.pass; });
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json props = nlohmann::json::array();
  for (const auto& r : results) {
    props.push_back({{"name", r.name},
                     {"pass", r.pass},
                     {"measured", r.measured},
                     {"tolerance", r.tolerance},
                     {"detail", r.detail}});
  }
  return {{"pass", pass()}, {"properties", std::move(props)}};
}

VerifyReport run_verify(const VerifyOptions& options) {
  Rng rng(options.seed);
  VerifyReport report;
  double number_drift = 0.0;
  double sz_drift = 0.0;
  report.results.push_back(norm_conservation(&number_drift, &sz_drift));
  report.results.push_back(check("particle_number_conservation", number_drift, 1e-10, "|<N>(t) - <N>(0)|"));
  report.results.push_back(check("hubbard_sz_conservation", sz_drift, 1e-10, "|<N_up - N_dn>(t) - <..>(0)|"));
  report.results.push_back(magnetization_conservation());
  report.results.push_back(jw_oracle(options.mutate_jw));
  report.results.push_back(frobenius_identity());
  report.results.push_back(lemma_draws(rng, options.draws));
  report.results.push_back(commutator_draws(rng, options.draws));
  report.results.push_back(delay_index_oracle(rng, options.index_draws));
  report.results.push_back(ihodmd_reduction());
  report.results.push_back(synthetic_dmd(rng));
  return report;
}

}  // namespace qdmd
