#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "oracles.hpp"
#include "qdmd/observables.hpp"
#include "qdmd/state_engine.hpp"

using namespace qdmd;

namespace {

StateVector random_state(std::mt19937_64& rng, std::size_t n) {
  return StateVector(n, oracle::random_state(rng, Eigen::Index{1} << n));
}

/// Product of dense term exponentials in plan order.
oracle::Mat dense_step(const TrotterPlan& plan) {
  const auto dim = Eigen::Index{1} << plan.hamiltonian.n_qubits();
  oracle::Mat u = oracle::Mat::Identity(dim, dim);
  for (std::size_t idx : plan.term_order) {
    const auto& t = plan.hamiltonian.terms()[idx];
    u = oracle::expm_hermitian(t.coefficient * oracle::pauli(t.string.str()), plan.dt) * u;
  }
  return u;
}

/// First-order product formula bound: (T dt / 2) sum_{i<j} ||[H_i, H_j]||_2.
double first_order_bound(const QubitHamiltonian& h, double total_time, double dt) {
  double sum = 0.0;
  const auto& terms = h.terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (!terms[i].string.commutes_with(terms[j].string)) sum += 2.0 * std::abs(terms[i].coefficient * terms[j].coefficient);
    }
  }
  return 0.5 * total_time * dt * sum;
}

}  // namespace

TEST(StateVector, ValidatesSizeAndNorm) {
  EXPECT_THROW(StateVector(2, Eigen::VectorXcd::Ones(3)), std::invalid_argument);
  EXPECT_THROW(StateVector(1, Eigen::VectorXcd::Ones(2)), std::invalid_argument);
  EXPECT_NO_THROW(StateVector(1, Eigen::VectorXcd::Ones(2) / std::sqrt(2.0)));
}

TEST(PauliExponential, ClosedFormCases) {
  const double theta = 0.37;
  const StateVector z = pauli_exponential(StateVector::basis_state(1, 0), PauliString::parse("Z"), theta);
  EXPECT_LT(std::abs(z.amplitudes()(0) - std::exp(cplx(0, -theta))), 1e-15);
  const StateVector x = pauli_exponential(StateVector::basis_state(1, 0), PauliString::parse("X"), std::numbers::pi / 2);
  EXPECT_LT(std::abs(x.amplitudes()(0)), 1e-15);
  EXPECT_LT(std::abs(x.amplitudes()(1) - cplx(0, -1)), 1e-15);
}

TEST(PauliExponential, MatchesDenseExponentialOnEightQubits) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const StateVector psi = random_state(rng, 8);
    const std::string s = oracle::random_letters(rng, 8);
    const double theta = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    const StateVector out = pauli_exponential(psi, PauliString::parse(s), theta);
    const oracle::Vec expected = oracle::expm_hermitian(oracle::pauli(s), theta) * psi.amplitudes();
    EXPECT_LT((out.amplitudes() - expected).norm(), 1e-12) << s;
  }
}

TEST(PauliExponential, SizeMismatchThrows) {
  StateVector psi = StateVector::basis_state(2, 0);
  EXPECT_THROW(apply_pauli_exponential(psi, PauliString::parse("XYZ"), 0.1), std::domain_error);
}

TEST(Trotter, CommutingTermsAreExact) {
  const QubitHamiltonian h(3, {{0.7, PauliString::parse("ZZI")}, {-0.3, PauliString::parse("IZZ")},
                               {1.1, PauliString::parse("ZIZ")}, {0.2, PauliString::parse("IIZ")}});
  std::mt19937_64 rng(22);
  StateVector psi = random_state(rng, 3);
  const StateVector exact = exact_evolve(psi, h, 0.05);
  trotter_step(psi, TrotterPlan::canonical(h, 0.05));
  EXPECT_LT((psi.amplitudes() - exact.amplitudes()).norm(), 1e-12);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
}

TEST(Trotter, StepEqualsDenseProductOfExponentials) {
  const TrotterPlan plan = TrotterPlan::canonical(build_hubbard_h1(HubbardParams::particle_hole_symmetric(2, 1.0, 0.1, 4.0)), 0.01);
  std::mt19937_64 rng(23);
  StateVector psi = random_state(rng, 4);
  const oracle::Vec expected = dense_step(plan) * psi.amplitudes();
  trotter_step(psi, plan);
  EXPECT_LT((psi.amplitudes() - expected).norm(), 1e-12);
}

TEST(Trotter, LocalErrorIsSecondOrder) {
  const QubitHamiltonian h = build_hubbard_h1(HubbardParams::particle_hole_symmetric(2, 1.0, 0.1, 4.0));
  std::mt19937_64 rng(24);
  const StateVector psi0 = random_state(rng, 4);
  double prev = 0.0;
  for (double dt : {0.02, 0.01}) {
    StateVector psi = psi0;
    trotter_step(psi, TrotterPlan::canonical(h, dt));
    const double err = (psi.amplitudes() - exact_evolve(psi0, h, dt).amplitudes()).norm();
    EXPECT_LE(err, first_order_bound(h, dt, dt) + 1e-14);
    if (prev > 0.0) EXPECT_NEAR(prev / err, 4.0, 0.4);
    prev = err;
  }
}

TEST(Trotter, ConvergesToExactEvolution) {
  const QubitHamiltonian h = build_hubbard_h1(HubbardParams::particle_hole_symmetric(2, 1.0, 0.1, 4.0));
  const StateVector psi0 = prepare_hubbard_ground_state(HubbardParams::particle_hole_symmetric(2, 1.0, 0.1, 4.0)).state;
  const StateVector exact = exact_evolve(psi0, h, 1.0);
  const TrotterPlan plan = TrotterPlan::canonical(h, 1e-4);
  StateVector psi = psi0;
  for (int i = 0; i < 10000; ++i) trotter_step(psi, plan);
  const double err = (psi.amplitudes() - exact.amplitudes()).norm();
  EXPECT_LE(err, first_order_bound(h, 1.0, 1e-4));
  std::cout << "state error after 10^4 steps of 1e-4: " << err << "\n";
}

TEST(Trotter, PlanValidation) {
  const QubitHamiltonian h = build_xxz({2, 1.0, 0.0});
  EXPECT_THROW(TrotterPlan::canonical(h, 0.0), std::invalid_argument);
  TrotterPlan bad = TrotterPlan::canonical(h, 0.1);
  bad.term_order.push_back(99);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(EvolveAndRecord, ZeroStepsGivesInitialSnapshot) {
  const Recorder rec = xxz_recorder(4);
  const SnapshotSeries s = evolve_and_record(prepare_domain_wall(4), TrotterPlan::canonical(build_xxz({4, 4.0, 0.1}), 0.01), 0, rec);
  EXPECT_EQ(s.columns(), 1u);
  EXPECT_NEAR(s.values(s.index_of("zz_1_2"), 0).real(), -1.0, 1e-15);
}

TEST(EvolveAndRecord, HorizonAndParticleNumber) {
  const HubbardParams p = HubbardParams::particle_hole_symmetric(4, 1.0, 0.1, 4.0);
  Recorder rec;
  rec.labels = {"N"};
  rec.complex_rows = {false};
  const QubitHamiltonian number = hubbard_number_operator(p.L);
  rec.measure = [&number](const StateVector& s) {
    Eigen::VectorXcd v(1);
    v(0) = number.expectation(s.span());
    return v;
  };
  const SnapshotSeries s = evolve_and_record(prepare_hubbard_ground_state(p).state,
                                             TrotterPlan::canonical(build_hubbard_h1(p), 0.01), 1000, rec);
  EXPECT_EQ(s.columns(), 1001u);
  EXPECT_NEAR(s.time(1000), 10.0, 1e-12);
  EXPECT_LT((s.values.row(0).array() - 4.0).abs().maxCoeff(), 1e-10);
}

TEST(ExactEvolve, ClosedFormAndIdentity) {
  const QubitHamiltonian z(1, {{1.0, PauliString::parse("Z")}});
  const StateVector out = exact_evolve(StateVector::basis_state(1, 0), z, 0.8);
  EXPECT_LT(std::abs(out.amplitudes()(0) - std::exp(cplx(0, -0.8))), 1e-14);
  std::mt19937_64 rng(25);
  const StateVector psi = random_state(rng, 4);
  const StateVector same = exact_evolve(psi, build_xxz({4, 1.0, 0.3}), 0.0);
  EXPECT_LT((same.amplitudes() - psi.amplitudes()).norm(), 1e-14);
}

TEST(ExactEvolve, RefusesLargeSystems) {
  const QubitHamiltonian h = build_xxz({16, 1.0, 0.0});
  EXPECT_THROW(ExactPropagator{h}, ResourceLimitError);
}

TEST(InitialStates, DomainWall) {
  const StateVector dw = prepare_domain_wall(2);
  EXPECT_EQ(dw.amplitudes()(2), cplx(1.0));  // qubit 0 up (|0>), qubit 1 down (|1>)
  const StateVector dw6 = prepare_domain_wall(6);
  EXPECT_NEAR(pauli_expectation(PauliString::parse("ZIIIII"), dw6.span()).real(), 1.0, 1e-15);
  EXPECT_NEAR(pauli_expectation(PauliString::parse("IIIIIZ"), dw6.span()).real(), -1.0, 1e-15);
  EXPECT_THROW(prepare_domain_wall(3), std::domain_error);
}

TEST(InitialStates, TwoSiteHubbardGroundState) {
  const HubbardParams p = HubbardParams::particle_hole_symmetric(2, 1.0, 0.1, 4.0);
  const GroundState gs = prepare_hubbard_ground_state(p);
  EXPECT_NEAR(gs.energy, -2.0, 1e-12);
  EXPECT_EQ(gs.sector_dimension, 4u);
  EXPECT_FALSE(gs.degenerate);
  for (Spin s : {Spin::Up, Spin::Down}) {
    const Eigen::MatrixXcd rho = density_matrix(gs.state, s, 2);
    EXPECT_LT((rho.array() - 0.5).abs().maxCoeff(), 1e-12);
  }
  EXPECT_NEAR(hubbard_number_operator(2).expectation(gs.state.span()), 2.0, 1e-12);
}

TEST(InitialStates, SixSiteGroundStateFillsHalf) {
  const GroundState gs = prepare_hubbard_ground_state(HubbardParams{});
  EXPECT_EQ(gs.sector_dimension, 400u);
  EXPECT_NEAR(density_matrix(gs.state, Spin::Up, 6).trace().real(), 3.0, 1e-10);
  EXPECT_NEAR(density_matrix(gs.state, Spin::Down, 6).trace().real(), 3.0, 1e-10);
}

TEST(StepBound, ClosedFormAndMonotonicity) {
  const double c = 2.0 * std::sqrt(std::log(5.0));
  EXPECT_NEAR(trotter_step_count_bound(1, 1, 0.01) / (4.0 * std::pow(100.0, c)), 1.0, 1e-12);
  EXPECT_NEAR(trotter_step_count_bound(1, 1, 0.01, StepBoundReading::SqrtLog) /
                  (4.0 * std::exp(c * std::sqrt(std::log(100.0)))),
              1.0, 1e-12);
  EXPECT_GE(trotter_step_count_bound(2, 2, 0.01), trotter_step_count_bound(2, 1, 0.01));
  EXPECT_GE(trotter_step_count_bound(4, 1, 0.01), 4.0 * trotter_step_count_bound(2, 1, 0.01));
  EXPECT_THROW(trotter_step_count_bound(1, 1, 2.0), std::domain_error);
}

TEST(Checkpoint, RoundTripAndCorruption) {
  std::mt19937_64 rng(26);
  const StateVector psi = random_state(rng, 5);
  const auto path = std::filesystem::temp_directory_path() / "qdmd_checkpoint_test.bin";
  write_checkpoint(path, psi);
  const StateVector back = read_checkpoint(path);
  EXPECT_EQ(back.amplitudes(), psi.amplitudes());
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.put('X');
  }
  EXPECT_THROW(read_checkpoint(path), std::runtime_error);
  std::filesystem::remove(path);
}
