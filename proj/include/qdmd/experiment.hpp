#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdmd/error_analysis.hpp"
#include "qdmd/ihodmd.hpp"
#include "qdmd/lattice_models.hpp"
#include "qdmd/snapshot_series.hpp"
#include "qdmd/state_engine.hpp"

namespace qdmd {

/// Bad or inconsistent configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ModelKind { Hubbard, XXZ };

struct ExperimentConfig {
  std::string name = "run";
  ModelKind model = ModelKind::Hubbard;
  HubbardParams hubbard;
  XXZParams xxz;

  double dt = 0.01;
  std::size_t total_steps = 1000;  ///< M; the series has M + 1 columns
  std::uint64_t shots = 0;         ///< 0 = exact expectations

  std::size_t fit_window = 400;  ///< m
  EmbeddingParams embedding{10, 4, 4};
  RankPolicy policy = RankPolicy::relative(1e-10);
  Readout readout = Readout::First;

  std::vector<std::string> rows;  ///< observables to extrapolate; empty = all recorded rows
  std::vector<std::size_t> sweep_m;

  std::uint64_t seed = 0;
  std::size_t threads = 1;

  std::size_t n_qubits() const;
  void validate() const;
  nlohmann::json to_json() const;
  /// Re-loadable key-value text.
  std::string to_text() const;
};

/// Statevector guard for `simulate`.
constexpr std::size_t kMaxSimulationQubits = 24;

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::filesystem::path& path);

QubitHamiltonian evolution_hamiltonian(const ExperimentConfig& cfg);
StateVector initial_state(const ExperimentConfig& cfg);
Recorder experiment_recorder(const ExperimentConfig& cfg);
/// Operator behind a recorded row label (rho_p_q, nk_j, zz_i_j, z_j).
PauliOperator observable_for_label(const ExperimentConfig& cfg, const std::string& label);

/// Prepares the initial state and records M Trotter steps; applies shot noise when shots > 0.
SnapshotSeries simulate(const ExperimentConfig& cfg);

struct Extrapolation {
  IHODMDModel model;
  SnapshotSeries truth;       ///< selected rows of the input trajectory
  SnapshotSeries prediction;  ///< same grid and rows
  ErrorCurve curve;
  EnvelopeCheck envelope;
};

/// Fits on the first m columns and predicts over the trajectory's full grid.
Extrapolation extrapolate(const ExperimentConfig& cfg, const SnapshotSeries& trajectory);

struct RowBound {
  std::string label;
  BoundInputs inputs;  ///< n = M + 1, the last snapshot
  double worst_ratio = 0.0;  ///< max over post-window n of |Delta(t_n)| / global_bound
  std::optional<std::size_t> first_violation;  ///< snapshot number n
  bool dominated = true;
  bool phi_rank_deficient = false;
};

struct BoundReport {
  std::vector<RowBound> rows;
  bool pass() const;
  nlohmann::json to_json() const;
};

/// Global error bound with measured norms, condition number and surrogate c_m,
/// checked against |Delta| at every snapshot after the fit window.
BoundReport bound_report(const ExperimentConfig& cfg, const Extrapolation& run);

std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const SnapshotSeries& trajectory);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_error_csv(const std::filesystem::path& path, const ErrorCurve& curve);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepPoint>& points);
/// config echo (text + JSON), Hamiltonian dump, code version.
void write_provenance(const std::filesystem::path& dir, const ExperimentConfig& cfg);
/// gnuplot script overlaying truth and prediction for the first row.
std::string gnuplot_script(const Extrapolation& run);

std::string version();

}  // namespace qdmd
