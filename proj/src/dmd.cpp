#include "qdmd/dmd.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qdmd {
namespace {

Eigen::MatrixXcd pseudo_inverse(const Eigen::MatrixXcd& a) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(a);
  return cod.pseudoInverse();
}

double matrix_condition(const Eigen::MatrixXcd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace

void DataMatrices::validate() const {
  if (X1.rows() != X2.rows() || X1.cols() != X2.cols()) {
    throw std::invalid_argument("DataMatrices: X1 and X2 must have the same shape");
  }
  if (X1.cols() < 1 || X1.rows() < 1) throw std::invalid_argument("DataMatrices: empty data");
  if (!(dt > 0.0)) throw std::invalid_argument("DataMatrices: dt must be positive");
}

DataMatrices build_data_matrices(const Eigen::MatrixXcd& snapshots, double dt, std::size_t m) {
  if (m < 3) throw std::domain_error("build_data_matrices: need m >= 3 snapshots");
  if (static_cast<std::size_t>(snapshots.cols()) < m) {
    throw std::domain_error(fmt::format("build_data_matrices: series has {} snapshots, m = {} requested",
                                        snapshots.cols(), m));
  }
  const auto k = static_cast<Eigen::Index>(m - 1);
  DataMatrices d{snapshots.leftCols(k), snapshots.middleCols(1, k), dt};
  d.validate();
  return d;
}

DataMatrices build_data_matrices(const SnapshotSeries& series, std::size_t m) {
  return build_data_matrices(series.values, series.dt, m);
}

void RankPolicy::validate() const {
  if (mode == Mode::Fixed && rank < 1) throw std::invalid_argument("RankPolicy: fixed rank must be >= 1");
  if (mode == Mode::RelativeThreshold && !(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("RankPolicy: threshold must lie in (0, 1)");
  }
}

std::string RankPolicy::describe() const {
  return mode == Mode::Fixed ? fmt::format("fixed:{}", rank) : fmt::format("threshold:{}", threshold);
}

TruncatedSvd truncated_svd(const Eigen::MatrixXcd& X, const RankPolicy& policy) {
  policy.validate();
  if (X.size() == 0 || X.cwiseAbs().maxCoeff() == 0.0) throw std::domain_error("truncated_svd: matrix is zero");

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  TruncatedSvd out;
  out.all_singular_values = s;

  std::size_t r = 0;
  if (policy.mode == RankPolicy::Mode::Fixed) {
    r = std::min<std::size_t>(policy.rank, static_cast<std::size_t>(s.size()));
    if (r < policy.rank) {
      out.warnings.push_back(fmt::format("requested rank {} exceeds the {} available singular values", policy.rank,
                                         s.size()));
    }
  } else {
    while (r < static_cast<std::size_t>(s.size()) && s(static_cast<Eigen::Index>(r)) >= policy.threshold * s(0)) ++r;
  }
  std::size_t kept = r;
  while (kept > 0 && s(static_cast<Eigen::Index>(kept - 1)) < kSingularFloor) --kept;
  if (kept < r) {
    out.warnings.push_back(fmt::format("rank reduced from {} to {}: singular values below {}", r, kept, kSingularFloor));
    r = kept;
  }
  if (r == 0) throw std::domain_error("truncated_svd: no singular value survives truncation");

  const auto ri = static_cast<Eigen::Index>(r);
  out.rank = r;
  out.U = svd.matrixU().leftCols(ri);
  out.sigma = s.head(ri);
  out.V = svd.matrixV().leftCols(ri);
  return out;
}

std::complex<double> continuous_exponent(std::complex<double> lambda, double dt) {
  const double mag = std::abs(lambda);
  if (mag == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
  if (lambda.real() < 0.0 && std::abs(lambda.imag()) <= 1e-12) {
    return std::complex<double>(std::log(mag), std::numbers::pi) / dt;
  }
  return std::log(lambda) / dt;
}

DmdModel fit_dmd(const DataMatrices& data, const DmdOptions& options) {
  data.validate();
  const TruncatedSvd svd = truncated_svd(data.X1, options.policy);

  const Eigen::MatrixXcd B = data.X2 * svd.V * svd.sigma.cwiseInverse().asDiagonal();
  const Eigen::MatrixXcd K = svd.U.adjoint() * B;  // projected Koopman operator

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(K, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("fit_dmd: eigen-decomposition failed");

  DmdModel model;
  model.dt = data.dt;
  model.rank = svd.rank;
  model.snapshots = static_cast<std::size_t>(data.X1.cols()) + 1;
  model.policy = options.policy;
  model.amplitude_fit = options.amplitudes;
  model.warnings = svd.warnings;
  model.eigenvalues = es.eigenvalues();
  model.modes = B * es.eigenvectors();
  model.eigenvector_condition = matrix_condition(es.eigenvectors());
  model.defective = !(model.eigenvector_condition <= kDefectiveCondition);
  if (model.defective) {
    model.warnings.push_back(fmt::format("projected operator is nearly defective (eigenvector condition {:.3e})",
                                         model.eigenvector_condition));
  }

  model.exponents.resize(model.eigenvalues.size());
  for (Eigen::Index i = 0; i < model.eigenvalues.size(); ++i) {
    model.exponents(i) = continuous_exponent(model.eigenvalues(i), data.dt);
  }

  const Eigen::VectorXcd x1 = data.X1.col(0);
  model.amplitudes = options.amplitudes == AmplitudeFit::LeastSquares ? Eigen::VectorXcd(pseudo_inverse(model.modes) * x1)
                                                                      : Eigen::VectorXcd(model.modes.adjoint() * x1);
  return model;
}

Eigen::VectorXcd predict(const DmdModel& model, double t) {
  Eigen::VectorXcd weights(model.amplitudes.size());
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const auto omega = model.exponents(i);
    // exp(-inf * 0) is NaN; a zero eigenvalue only contributes at t = 0.
    const auto growth = (t == 0.0) ? std::complex<double>(1.0) : std::exp(omega * t);
    weights(i) = growth * model.amplitudes(i);
  }
  return model.modes * weights;
}

Eigen::MatrixXcd reconstruct(const DmdModel& model, std::span<const double> times) {
  Eigen::MatrixXcd out(model.modes.rows(), static_cast<Eigen::Index>(times.size()));
  for (std::size_t n = 0; n < times.size(); ++n) out.col(static_cast<Eigen::Index>(n)) = predict(model, times[n]);
  return out;
}

Eigen::MatrixXcd one_step_operator(const DmdModel& model) {
  return model.modes * model.eigenvalues.asDiagonal() * pseudo_inverse(model.modes);
}

nlohmann::json complex_matrix_json(const Eigen::MatrixXcd& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) data.push_back({m(r, c).real(), m(r, c).imag()});
  }
  return {{"shape", {m.rows(), m.cols()}}, {"order", "column-major"}, {"data", std::move(data)}};
}

nlohmann::json to_json(const DmdModel& model) {
  auto vec = [](const Eigen::VectorXcd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v(i).real(), v(i).imag()});
    return a;
  };
  return {
      {"r", model.rank},
      {"dt", model.dt},
      {"m", model.snapshots},
      {"policy", model.policy.describe()},
      {"amplitude_fit", model.amplitude_fit == AmplitudeFit::LeastSquares ? "least_squares" : "adjoint"},
      {"conditioning", {{"eigenvector_condition", model.eigenvector_condition}, {"defective", model.defective}}},
      {"warnings", model.warnings},
      {"eigenvalues", vec(model.eigenvalues)},
      {"exponents", vec(model.exponents)},
      {"amplitudes", vec(model.amplitudes)},
      {"modes", complex_matrix_json(model.modes)},
  };
}

}  // namespace qdmd
