#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdmd/dmd.hpp"
#include "qdmd/pauli.hpp"
#include "qdmd/snapshot_series.hpp"

namespace qdmd {

/// Delay embedding: n_s rows, column stride n_g grid steps, shift tau grid steps.
struct EmbeddingParams {
  std::size_t n_s = 1;
  std::size_t n_g = 1;
  std::size_t tau = 1;

  void validate() const;
  std::size_t min_window() const { return n_s + tau + 1; }
  /// n_l = floor((m - n_s - tau) / n_g) + 1; throws std::domain_error when m < min_window().
  std::size_t columns(std::size_t m) const;
  std::string describe() const;
};

/// X~1(i, l) = row[l n_g + i], X~2(i, l) = row[l n_g + i + tau] (0-based).
DataMatrices build_delay_matrices(std::span<const cplx> row, const EmbeddingParams& params, std::size_t m,
                                  double dt);

enum class Readout {
  First,         ///< first embedded component
  DelayAverage,  ///< mean over components i of z_i(t - i dt) where t - i dt >= 0
};

struct IHODMDRow {
  std::string label;
  bool complex_valued = false;
  bool skipped = false;  ///< degenerate spread: predicted as the constant mean
  cplx mean{0.0, 0.0};
  double std = 1.0;
  std::optional<DmdModel> model;
  std::string error;  ///< fit failure message; prediction is NaN for this row

  bool failed() const { return !skipped && !model.has_value(); }
};

struct IHODMDModel {
  std::vector<IHODMDRow> rows;
  EmbeddingParams params;
  double dt = 0.0;           ///< original grid spacing
  double dt_embedded = 0.0;  ///< tau * dt
  std::size_t window = 0;    ///< m
  RankPolicy policy;

  std::size_t size() const { return rows.size(); }
  std::vector<std::string> labels() const;
  std::vector<std::string> failures() const;  ///< "label: message" per failed row
};

IHODMDModel fit_ihodmd(const SnapshotSeries& series, std::size_t m, const EmbeddingParams& params,
                       const RankPolicy& policy = RankPolicy::relative(1e-10), std::size_t threads = 1);

/// Embedded state z(t) of one row in standardized units.
Eigen::VectorXcd predict_embedded(const IHODMDRow& row, double t);

/// One value per row in original units. Real rows carry a zero imaginary part.
Eigen::VectorXcd predict_ihodmd(const IHODMDModel& model, double t, Readout readout = Readout::First);

/// Prediction on t_n = n dt, n = 0..steps, labelled like the fitted series.
SnapshotSeries predict_series(const IHODMDModel& model, std::size_t steps, Readout readout = Readout::First);

nlohmann::json to_json(const IHODMDModel& model);

}  // namespace qdmd
