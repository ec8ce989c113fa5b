#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qdmd/snapshot_series.hpp"

namespace qdmd {

/// X1 = [x_1 .. x_{m-1}], X2 = [x_2 .. x_m], columns dt apart.
struct DataMatrices {
  Eigen::MatrixXcd X1;
  Eigen::MatrixXcd X2;
  double dt = 0.0;

  void validate() const;
};

DataMatrices build_data_matrices(const SnapshotSeries& series, std::size_t m);
DataMatrices build_data_matrices(const Eigen::MatrixXcd& snapshots, double dt, std::size_t m);

struct RankPolicy {
  enum class Mode { Fixed, RelativeThreshold };

  Mode mode = Mode::RelativeThreshold;
  std::size_t rank = 0;      ///< used when mode == Fixed
  double threshold = 1e-10;  ///< keep sigma_i >= threshold * sigma_1

  static RankPolicy fixed(std::size_t r) { return {Mode::Fixed, r, 0.0}; }
  static RankPolicy relative(double theta) { return {Mode::RelativeThreshold, 0, theta}; }
  void validate() const;
  std::string describe() const;
};

/// Singular values below this are dropped regardless of policy.
constexpr double kSingularFloor = 1e-14;

struct TruncatedSvd {
  Eigen::MatrixXcd U;       ///< N x r
  Eigen::VectorXd sigma;    ///< r, descending
  Eigen::MatrixXcd V;       ///< cols x r, X ~= U diag(sigma) V^*
  std::size_t rank = 0;
  Eigen::VectorXd all_singular_values;
  std::vector<std::string> warnings;
};

TruncatedSvd truncated_svd(const Eigen::MatrixXcd& X, const RankPolicy& policy);

enum class AmplitudeFit {
  LeastSquares,  ///< b = pinv(Phi) x_1
  Adjoint,       ///< b = Phi^* x_1
};

struct DmdOptions {
  RankPolicy policy = RankPolicy::relative(1e-10);
  AmplitudeFit amplitudes = AmplitudeFit::LeastSquares;
};

/// Eigenvector-matrix condition above which K~ is flagged as (numerically) defective.
constexpr double kDefectiveCondition = 1e12;

/// Fitted surrogate x(t) = Phi exp(Omega t) b.
struct DmdModel {
  Eigen::MatrixXcd modes;        ///< Phi, N x r
  Eigen::VectorXcd eigenvalues;  ///< Lambda
  Eigen::VectorXcd exponents;    ///< Omega = ln(Lambda)/dt
  Eigen::VectorXcd amplitudes;   ///< b
  double dt = 0.0;
  std::size_t rank = 0;

  std::size_t snapshots = 0;  ///< m
  RankPolicy policy;
  AmplitudeFit amplitude_fit = AmplitudeFit::LeastSquares;
  double eigenvector_condition = 1.0;
  bool defective = false;
  std::vector<std::string> warnings;

  std::size_t state_dimension() const { return static_cast<std::size_t>(modes.rows()); }
};

DmdModel fit_dmd(const DataMatrices& data, const DmdOptions& options = {});

/// Principal-branch ln(lambda)/dt; lambda on the negative real axis maps to +i pi/dt.
std::complex<double> continuous_exponent(std::complex<double> lambda, double dt);

Eigen::VectorXcd predict(const DmdModel& model, double t);
/// One column per entry of `times`.
Eigen::MatrixXcd reconstruct(const DmdModel& model, std::span<const double> times);
/// Phi diag(Lambda) pinv(Phi), the one-step operator in observable space.
Eigen::MatrixXcd one_step_operator(const DmdModel& model);

nlohmann::json to_json(const DmdModel& model);
nlohmann::json complex_matrix_json(const Eigen::MatrixXcd& m);

}  // namespace qdmd
