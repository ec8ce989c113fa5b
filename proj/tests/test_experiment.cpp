#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "qdmd/experiment.hpp"
#include "qdmd/observables.hpp"

using namespace qdmd;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

const char* kSmallHubbard = R"(
# two-site quench
[run]
name = "small"
seed = 5

[model]
type = "hubbard"
L = 2
U = 4.0
tau0 = 1.0
tau1 = 0.1

[simulation]
dt = 0.01
steps = 300

[dmd]
window = 120
n_s = 6
n_g = 2
tau = 2
threshold = 1e-10

[observables]
rows = ["rho_0_1", "nk_0"]
)";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Config, ParsesSectionsAndDefaults) {
  const ExperimentConfig cfg = parse(kSmallHubbard);
  EXPECT_EQ(cfg.name, "small");
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.model, ModelKind::Hubbard);
  EXPECT_EQ(cfg.hubbard.L, 2);
  EXPECT_DOUBLE_EQ(cfg.hubbard.mu, 2.0);  // defaults to U/2
  EXPECT_EQ(cfg.total_steps, 300u);
  EXPECT_EQ(cfg.embedding.n_s, 6u);
  EXPECT_EQ(cfg.policy.mode, RankPolicy::Mode::RelativeThreshold);
  EXPECT_EQ(cfg.rows, (std::vector<std::string>{"rho_0_1", "nk_0"}));
  EXPECT_EQ(cfg.n_qubits(), 4u);
}

TEST(Config, XxzModelAndSweepList) {
  const ExperimentConfig cfg = parse("[model]\ntype = xxz\nL = 6\nh = 0.2\n[sweep]\nm_values = [100, 150]\n");
  EXPECT_EQ(cfg.model, ModelKind::XXZ);
  EXPECT_DOUBLE_EQ(cfg.xxz.h, 0.2);
  EXPECT_EQ(cfg.sweep_m, (std::vector<std::size_t>{100, 150}));
}

TEST(Config, RejectsInvalidInput) {
  EXPECT_THROW(parse("[model]\ntype = ising\n"), ConfigError);
  EXPECT_THROW(parse("[model]\nspin = 1\n"), ConfigError);
  EXPECT_THROW(parse("[extra]\nx = 1\n"), ConfigError);
  EXPECT_THROW(parse("[simulation]\ndt = -0.1\n"), ConfigError);
  EXPECT_THROW(parse("[simulation]\nsteps = ten\n"), ConfigError);
  EXPECT_THROW(parse("[simulation]\nsteps = 100\n[dmd]\nwindow = 400\n"), ConfigError);
  EXPECT_THROW(parse("[dmd]\nrank = 3\nthreshold = 1e-8\n"), ConfigError);
  EXPECT_THROW(parse("[dmd]\nreadout = last\n"), ConfigError);
  EXPECT_THROW(parse("[dmd]\nwindow = 14\n"), ConfigError);
  EXPECT_THROW(parse("[model]\nL = 3\n"), ConfigError);
  EXPECT_THROW(parse("[model]\ntype = xxz\nmu = 1\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.toml"), ConfigError);
}

TEST(Config, TextEchoRoundTrips) {
  ExperimentConfig cfg = parse(kSmallHubbard);
  cfg.sweep_m = {130, 140};
  cfg.readout = Readout::DelayAverage;
  const ExperimentConfig back = parse(cfg.to_text());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  cfg.policy = RankPolicy::fixed(7);
  EXPECT_EQ(parse(cfg.to_text()).to_json(), cfg.to_json());
}

TEST(Observables, LabelsResolveToRecordedOperators) {
  const ExperimentConfig cfg = parse(kSmallHubbard);
  const StateVector psi = initial_state(cfg);
  const Recorder rec = experiment_recorder(cfg);
  const Eigen::VectorXcd v = rec.measure(psi);
  for (std::size_t r = 0; r < rec.labels.size(); ++r) {
    const cplx direct = observable_for_label(cfg, rec.labels[r]).expectation(psi.span());
    EXPECT_LT(std::abs(direct - v(static_cast<Eigen::Index>(r))), 1e-12) << rec.labels[r];
  }
  EXPECT_THROW(observable_for_label(cfg, "rho_0_2"), ConfigError);
  EXPECT_THROW(observable_for_label(cfg, "zz_0_1"), ConfigError);
  const ExperimentConfig xxz = parse("[model]\ntype = xxz\nL = 4\n");
  EXPECT_EQ(observable_for_label(xxz, "zz_1_3").dense(), PauliOperator::from_string("IZIZ").dense());
}

TEST(Simulate, ZeroStepsAndResourceGuard) {
  ExperimentConfig cfg = parse(kSmallHubbard);
  cfg.total_steps = 0;
  cfg.fit_window = 1;
  const SnapshotSeries s = simulate(cfg);
  EXPECT_EQ(s.columns(), 1u);
  cfg.hubbard.L = 14;
  try {
    simulate(cfg);
    FAIL() << "expected ResourceLimitError";
  } catch (const ResourceLimitError& e) {
    EXPECT_NE(std::string(e.what()).find("GiB"), std::string::npos);
  }
}

TEST(Simulate, DeterministicCsvAndShotNoise) {
  ExperimentConfig cfg = parse(kSmallHubbard);
  cfg.total_steps = 50;
  cfg.fit_window = 40;
  cfg.shots = 1000;
  const auto dir = std::filesystem::temp_directory_path() / "qdmd_test_experiment";
  std::filesystem::create_directories(dir);
  write_csv(dir / "a.csv", simulate(cfg));
  write_csv(dir / "b.csv", simulate(cfg));
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  const SnapshotSeries back = read_csv(dir / "a.csv");
  EXPECT_EQ(back.columns(), 51u);
  cfg.seed = 6;
  write_csv(dir / "c.csv", simulate(cfg));
  EXPECT_NE(slurp(dir / "a.csv"), slurp(dir / "c.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Extrapolate, SmallRunProducesArtifacts) {
  const ExperimentConfig cfg = parse(kSmallHubbard);
  const SnapshotSeries traj = simulate(cfg);
  const Extrapolation run = extrapolate(cfg, traj);
  EXPECT_EQ(run.prediction.columns(), traj.columns());
  EXPECT_EQ(run.prediction.labels, cfg.rows);
  EXPECT_TRUE(run.model.failures().empty());
  // the two-site quench has a handful of frequencies: the fit should track it
  EXPECT_LT(run.curve.errors.maxCoeff(), 1e-3);
  EXPECT_NEAR(run.envelope.t_min, 1.19, 1e-12);

  const BoundReport report = bound_report(cfg, run);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].inputs.n, 301u);
  EXPECT_TRUE(report.pass());
  EXPECT_EQ(report.to_json()["rows"].size(), 2u);

  const auto dir = std::filesystem::temp_directory_path() / "qdmd_test_extrapolate";
  std::filesystem::create_directories(dir);
  write_error_csv(dir / "error.csv", run.curve);
  write_provenance(dir, cfg);
  EXPECT_EQ(slurp(dir / "error.csv").substr(0, 17), "t,rho_0_1,nk_0\n0,");
  EXPECT_EQ(load_config(dir / "config.toml").to_json(), cfg.to_json());
  const auto prov = nlohmann::json::parse(slurp(dir / "provenance.json"));
  EXPECT_EQ(prov["version"], version());
  EXPECT_FALSE(gnuplot_script(run).empty());
  std::filesystem::remove_all(dir);
}

TEST(Extrapolate, InfeasibleWindowNamesMinimum) {
  ExperimentConfig cfg = parse(kSmallHubbard);
  cfg.fit_window = 5;
  const SnapshotSeries traj = simulate(cfg);
  try {
    extrapolate(cfg, traj);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("m = 9"), std::string::npos) << e.what();
  }
}

TEST(Sweep, SingletonTable) {
  ExperimentConfig cfg = parse(kSmallHubbard);
  cfg.rows = {"nk_0"};
  cfg.sweep_m = {150};
  const auto pts = sweep(cfg, simulate(cfg));
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_EQ(pts[0].m, 150u);
  const auto dir = std::filesystem::temp_directory_path() / "qdmd_test_sweep";
  std::filesystem::create_directories(dir);
  write_sweep_csv(dir / "sweep.csv", pts);
  EXPECT_EQ(slurp(dir / "sweep.csv").substr(0, 15), "m,error_at_T\n15");
  std::filesystem::remove_all(dir);
  cfg.rows = {"nk_0", "nk_1"};
  EXPECT_THROW(sweep(cfg, simulate(cfg)), ConfigError);
}
