#include "qdmd/ihodmd.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qdmd/observables.hpp"
#include "qdmd/parallel.hpp"

namespace qdmd {

void EmbeddingParams::validate() const {
  if (n_s < 1 || n_g < 1 || tau < 1) {
    throw std::invalid_argument(fmt::format("embedding {}: n_s, n_g and tau must all be >= 1", describe()));
  }
}

std::size_t EmbeddingParams::columns(std::size_t m) const {
  validate();
  if (m < min_window()) {
    throw std::domain_error(
        fmt::format("embedding {} needs a fit window of at least m = {} snapshots (got {})", describe(), min_window(), m));
  }
  return (m - n_s - tau) / n_g + 1;
}

std::string EmbeddingParams::describe() const { return fmt::format("iHODMD({},{},{})", n_s, n_g, tau); }

DataMatrices build_delay_matrices(std::span<const cplx> row, const EmbeddingParams& params, std::size_t m,
                                  double dt) {
  const std::size_t cols = params.columns(m);
  if (row.size() < m) {
    throw std::domain_error(fmt::format("build_delay_matrices: row has {} samples, window m = {}", row.size(), m));
  }
  const auto ns = static_cast<Eigen::Index>(params.n_s);
  const auto nl = static_cast<Eigen::Index>(cols);
  DataMatrices d{Eigen::MatrixXcd(ns, nl), Eigen::MatrixXcd(ns, nl), dt * static_cast<double>(params.tau)};
  for (Eigen::Index l = 0; l < nl; ++l) {
    const std::size_t base = static_cast<std::size_t>(l) * params.n_g;
    for (Eigen::Index i = 0; i < ns; ++i) {
      const std::size_t k = base + static_cast<std::size_t>(i);
      d.X1(i, l) = row[k];
      d.X2(i, l) = row[k + params.tau];
    }
  }
  return d;
}

std::vector<std::string> IHODMDModel::labels() const {
  std::vector<std::string> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.label);
  return out;
}

std::vector<std::string> IHODMDModel::failures() const {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (r.failed()) out.push_back(r.label + ": " + r.error);
  }
  return out;
}

IHODMDModel fit_ihodmd(const SnapshotSeries& series, std::size_t m, const EmbeddingParams& params,
                       const RankPolicy& policy, std::size_t threads) {
  series.validate();
  params.columns(m);  // feasibility
  policy.validate();
  if (m > series.columns()) {
    throw std::domain_error(fmt::format("fit_ihodmd: window m = {} exceeds the {} recorded snapshots", m,
                                        series.columns()));
  }

  const StandardizedSeries standardized = standardize(series, m);
  IHODMDModel model;
  model.params = params;
  model.dt = series.dt;
  model.dt_embedded = series.dt * static_cast<double>(params.tau);
  model.window = m;
  model.policy = policy;
  model.rows.resize(series.rows());

  parallel_for(series.rows(), threads, [&](std::size_t j) {
    IHODMDRow& row = model.rows[j];
    const auto i = static_cast<Eigen::Index>(j);
    row.label = series.labels[j];
    row.complex_valued = series.complex_rows[j];
    row.mean = standardized.means(i);
    row.std = standardized.stds(i);
    if (standardized.skipped(j)) {
      row.skipped = true;
      return;
    }
    const Eigen::VectorXcd values = standardized.values.row(i).head(static_cast<Eigen::Index>(m)).transpose();
    try {
      row.model = fit_dmd(build_delay_matrices({values.data(), m}, params, m, series.dt), {policy});
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return model;
}

Eigen::VectorXcd predict_embedded(const IHODMDRow& row, double t) {
  if (!row.model) throw std::logic_error("predict_embedded: row '" + row.label + "' has no fitted model");
  return predict(*row.model, t);
}

namespace {

cplx standardized_value(const IHODMDRow& row, double t, double dt, Readout readout) {
  if (readout == Readout::First) return predict_embedded(row, t)(0);
  cplx sum{0.0, 0.0};
  std::size_t count = 0;
  const auto ns = row.model->state_dimension();
  for (std::size_t i = 0; i < ns; ++i) {
    const double shifted = t - static_cast<double>(i) * dt;
    if (shifted < -1e-12 * dt) break;
    sum += predict_embedded(row, std::max(shifted, 0.0))(static_cast<Eigen::Index>(i));
    ++count;
  }
  return sum / static_cast<double>(count);
}

}  // namespace

Eigen::VectorXcd predict_ihodmd(const IHODMDModel& model, double t, Readout readout) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(model.rows.size()));
  for (std::size_t j = 0; j < model.rows.size(); ++j) {
    const IHODMDRow& row = model.rows[j];
    cplx v;
    if (row.skipped) {
      v = row.mean;
    } else if (row.failed()) {
      v = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    } else {
      v = standardized_value(row, t, model.dt, readout) * row.std + row.mean;
    }
    if (!row.complex_valued) v = {v.real(), 0.0};
    out(static_cast<Eigen::Index>(j)) = v;
  }
  return out;
}

SnapshotSeries predict_series(const IHODMDModel& model, std::size_t steps, Readout readout) {
  SnapshotSeries out;
  out.dt = model.dt;
  out.labels = model.labels();
  for (const auto& r : model.rows) out.complex_rows.push_back(r.complex_valued);
  out.values.resize(static_cast<Eigen::Index>(model.rows.size()), static_cast<Eigen::Index>(steps + 1));
  for (std::size_t n = 0; n <= steps; ++n) {
    out.values.col(static_cast<Eigen::Index>(n)) = predict_ihodmd(model, model.dt * static_cast<double>(n), readout);
  }
  return out;
}

nlohmann::json to_json(const IHODMDModel& model) {
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json means = nlohmann::json::array();
  nlohmann::json stds = nlohmann::json::array();
  nlohmann::json skipped = nlohmann::json::array();
  for (std::size_t j = 0; j < model.rows.size(); ++j) {
    const auto& r = model.rows[j];
    means.push_back({r.mean.real(), r.mean.imag()});
    stds.push_back(r.std);
    if (r.skipped) skipped.push_back(r.label);
    nlohmann::json entry = {{"label", r.label}, {"complex", r.complex_valued}, {"skipped", r.skipped}};
    if (r.model) entry["model"] = to_json(*r.model);
    if (r.failed()) entry["error"] = r.error;
    rows.push_back(std::move(entry));
  }
  return {
      {"n_s", model.params.n_s},
      {"n_g", model.params.n_g},
      {"tau", model.params.tau},
      {"dt", model.dt},
      {"dt_embedded", model.dt_embedded},
      {"m", model.window},
      {"policy", model.policy.describe()},
      {"means", std::move(means)},
      {"stds", std::move(stds)},
      {"skipped_rows", std::move(skipped)},
      {"rows", std::move(rows)},
  };
}

}  // namespace qdmd
