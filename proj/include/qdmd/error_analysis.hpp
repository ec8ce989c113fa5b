#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qdmd/dmd.hpp"
#include "qdmd/ihodmd.hpp"
#include "qdmd/snapshot_series.hpp"

namespace qdmd {

/// |truth - predicted| for selected rows on a shared grid.
struct ErrorCurve {
  std::vector<double> times;
  std::vector<std::string> labels;
  Eigen::MatrixXd errors;  ///< rows = labels, columns = times
  std::size_t m = 0;
  std::string params;
  std::string model_id;

  /// Euclidean norm over rows at each time; equals |Delta| for a single row.
  std::vector<double> aggregate() const;
};

/// Rows default to every row of `truth`. Throws std::domain_error on grid mismatch.
ErrorCurve empirical_error_curve(const SnapshotSeries& truth, const SnapshotSeries& predicted,
                                 std::span<const std::string> rows = {});

struct BoundInputs {
  double h_frobenius = 0.0;  ///< ||H||_F
  double o_frobenius = 0.0;  ///< sqrt(sum_j ||O_j||_F^2)
  double c_m = 0.0;          ///< one-step approximation constant
  double delta_m = 0.0;      ///< error at the end of the fit window
  double phi_cond = 1.0;     ///< ||Phi||_2 ||Phi^+||_2
  double dt = 0.0;
  std::size_t n = 0;
  std::size_t m = 0;

  void validate() const;
};

/// c_m ||O||_F (1 + 2 n dt ||H||_F^2)^{1/2}
double local_bound(const BoundInputs& in);
/// cond(Phi) [delta_m + (n - m) local_bound]; throws std::domain_error for n < m.
double global_bound(const BoundInputs& in);
/// Long-time form with t = n dt and n - m replaced by t / dt.
double global_bound_continuous(const BoundInputs& in, double t);

nlohmann::json to_json(const BoundInputs& in);

struct EnvelopeCheck {
  double C = 0.0;           ///< max |Delta| / t^{3/2} over t >= t_min
  double tail_slope = 0.0;  ///< log-log slope of the running-max envelope over the tail
  bool pass = true;
  std::size_t points = 0;
  double t_min = 0.0;
};

constexpr double kEnvelopeSlopeLimit = 1.7;

/// The tail is the later half of the points with t >= t_min (and t > 0).
EnvelopeCheck t32_envelope_check(std::span<const double> times, std::span<const double> errors, double t_min,
                                 double slope_limit = kEnvelopeSlopeLimit);
EnvelopeCheck t32_envelope_check(const ErrorCurve& curve, double t_min, double slope_limit = kEnvelopeSlopeLimit);

nlohmann::json to_json(const EnvelopeCheck& check);

struct ConditionNumber {
  double value = 1.0;
  bool infinite = false;  ///< Phi not of full column rank
};

/// sigma_max / sigma_min of Phi.
ConditionNumber condition_number(const Eigen::MatrixXcd& modes);

/// max over fit columns of ||x2 - Phi Lambda Phi^+ x1|| / ||x1||.
double surrogate_cm(const DmdModel& model, const DataMatrices& data);

struct LemmaCheck {
  double lhs = 0.0;  ///< |<psi|O|psi>|
  double mid = 0.0;  ///< ||O||_2
  double rhs = 0.0;  ///< ||O||_F
  bool pass = false;
};

/// Throws std::domain_error when psi is not a unit vector (1e-10) or shapes differ.
LemmaCheck lemma_a_check(const Eigen::MatrixXcd& op, const Eigen::VectorXcd& psi);

struct CommutatorCheck {
  double lhs = 0.0;  ///< ||AB - BA||_F^2
  double rhs = 0.0;  ///< 2 ||A||_F^2 ||B||_F^2
  bool pass = false;
};

CommutatorCheck commutator_frobenius_check(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

struct SweepPoint {
  std::size_t m = 0;
  double error = 0.0;  ///< |Delta(T)|
  bool skipped = false;
  std::string notice;
};

struct SweepRequest {
  std::string row;  ///< label of the observable
  std::vector<std::size_t> m_values;
  EmbeddingParams params;
  RankPolicy policy = RankPolicy::relative(1e-10);
  std::size_t final_column = 0;  ///< index of T in the truth series
  Readout readout = Readout::First;
};

/// Fits on the first m columns of `truth` for each m and records |Delta| at final_column.
std::vector<SweepPoint> error_vs_m_sweep(const SnapshotSeries& truth, const SweepRequest& request,
                                         std::size_t threads = 1);

}  // namespace qdmd
