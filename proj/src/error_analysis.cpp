#include "qdmd/error_analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qdmd/parallel.hpp"

namespace qdmd {

std::vector<double> ErrorCurve::aggregate() const {
  std::vector<double> out(times.size());
  for (std::size_t n = 0; n < times.size(); ++n) out[n] = errors.col(static_cast<Eigen::Index>(n)).norm();
  return out;
}

ErrorCurve empirical_error_curve(const SnapshotSeries& truth, const SnapshotSeries& predicted,
                                 std::span<const std::string> rows) {
  if (truth.columns() != predicted.columns() || std::abs(truth.dt - predicted.dt) > 1e-12 * truth.dt) {
    throw std::domain_error(fmt::format("empirical_error_curve: grids differ ({} x {} vs {} x {})", truth.columns(),
                                        truth.dt, predicted.columns(), predicted.dt));
  }
  ErrorCurve curve;
  curve.times = truth.times();
  if (rows.empty()) {
    curve.labels = truth.labels;
  } else {
    curve.labels.assign(rows.begin(), rows.end());
  }
  curve.errors.resize(static_cast<Eigen::Index>(curve.labels.size()), static_cast<Eigen::Index>(truth.columns()));
  for (std::size_t r = 0; r < curve.labels.size(); ++r) {
    const auto a = static_cast<Eigen::Index>(truth.index_of(curve.labels[r]));
    const auto b = static_cast<Eigen::Index>(predicted.index_of(curve.labels[r]));
    curve.errors.row(static_cast<Eigen::Index>(r)) = (truth.values.row(a) - predicted.values.row(b)).cwiseAbs();
  }
  return curve;
}

void BoundInputs::validate() const {
  const double fields[] = {h_frobenius, o_frobenius, c_m, delta_m, phi_cond, dt};
  for (double v : fields) {
    if (!(v >= 0.0)) throw std::domain_error("BoundInputs: all inputs must be nonnegative");
  }
  if (n < m) throw std::domain_error(fmt::format("BoundInputs: n = {} precedes the fit window m = {}", n, m));
}

double local_bound(const BoundInputs& in) {
  in.validate();
  const double growth = 1.0 + 2.0 * static_cast<double>(in.n) * in.dt * in.h_frobenius * in.h_frobenius;
  return in.c_m * in.o_frobenius * std::sqrt(growth);
}

double global_bound(const BoundInputs& in) {
  in.validate();
  return in.phi_cond * (in.delta_m + static_cast<double>(in.n - in.m) * local_bound(in));
}

double global_bound_continuous(const BoundInputs& in, double t) {
  if (!(in.dt > 0.0) || !(t >= 0.0)) throw std::domain_error("global_bound_continuous: need dt > 0, t >= 0");
  const double local = in.c_m * in.o_frobenius * std::sqrt(1.0 + 2.0 * t * in.h_frobenius * in.h_frobenius);
  return in.phi_cond * (in.delta_m + t / in.dt * local);
}

nlohmann::json to_json(const BoundInputs& in) {
  return {{"h_frobenius", in.h_frobenius}, {"o_frobenius", in.o_frobenius}, {"c_m", in.c_m},
          {"delta_m", in.delta_m},         {"phi_cond", in.phi_cond},       {"dt", in.dt},
          {"n", in.n},                     {"m", in.m}};
}

EnvelopeCheck t32_envelope_check(std::span<const double> times, std::span<const double> errors, double t_min,
                                 double slope_limit) {
  if (times.size() != errors.size() || times.empty()) {
    throw std::domain_error("t32_envelope_check: times and errors must be nonempty and of equal length");
  }
  if (t_min > times.back()) throw std::domain_error("t32_envelope_check: t_min lies beyond the curve");

  EnvelopeCheck out;
  out.t_min = t_min;
  std::vector<double> ts;
  std::vector<double> env;
  double running = 0.0;
  bool finite = true;
  for (std::size_t n = 0; n < times.size(); ++n) {
    const double t = times[n];
    if (t < t_min || t <= 0.0) continue;
    const double e = errors[n];
    if (!std::isfinite(e)) finite = false;
    out.C = std::max(out.C, e / std::pow(t, 1.5));
    running = std::max(running, e);
    ts.push_back(t);
    env.push_back(running);
  }
  out.points = ts.size();
  if (!finite) {
    out.C = std::numeric_limits<double>::infinity();
    out.tail_slope = std::numeric_limits<double>::infinity();
    out.pass = false;
    return out;
  }

  // least-squares slope of log(envelope) against log(t) over the later half
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (std::size_t i = ts.size() / 2; i < ts.size(); ++i) {
    if (env[i] <= 0.0) continue;
    const double x = std::log(ts[i]);
    const double y = std::log(env[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++k;
  }
  const double denom = static_cast<double>(k) * sxx - sx * sx;
  out.tail_slope = (k >= 2 && denom > 0.0) ? (static_cast<double>(k) * sxy - sx * sy) / denom : 0.0;
  out.pass = std::isfinite(out.C) && out.tail_slope <= slope_limit;
  return out;
}

EnvelopeCheck t32_envelope_check(const ErrorCurve& curve, double t_min, double slope_limit) {
  const auto agg = curve.aggregate();
  return t32_envelope_check(curve.times, agg, t_min, slope_limit);
}

nlohmann::json to_json(const EnvelopeCheck& check) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf"); };
  return {{"C", num(check.C)},
          {"tail_slope", num(check.tail_slope)},
          {"slope_limit", kEnvelopeSlopeLimit},
          {"t_min", check.t_min},
          {"points", check.points},
          {"pass", check.pass}};
}

ConditionNumber condition_number(const Eigen::MatrixXcd& modes) {
  if (modes.size() == 0) return {};
  if (modes.cols() > modes.rows()) return {std::numeric_limits<double>::infinity(), true};
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(modes);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  const double tol = smax * std::numeric_limits<double>::epsilon() * static_cast<double>(modes.rows());
  if (smin <= tol) return {std::numeric_limits<double>::infinity(), true};
  return {smax / smin, false};
}

double surrogate_cm(const DmdModel& model, const DataMatrices& data) {
  const Eigen::MatrixXcd K = one_step_operator(model);
  double worst = 0.0;
  for (Eigen::Index l = 0; l < data.X1.cols(); ++l) {
    const double scale = data.X1.col(l).norm();
    if (scale == 0.0) continue;
    worst = std::max(worst, (data.X2.col(l) - K * data.X1.col(l)).norm() / scale);
  }
  return worst;
}

LemmaCheck lemma_a_check(const Eigen::MatrixXcd& op, const Eigen::VectorXcd& psi) {
  if (op.rows() != op.cols() || op.rows() != psi.size()) throw std::domain_error("lemma_a_check: shape mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw std::domain_error("lemma_a_check: psi must be a unit vector");
  LemmaCheck out;
  out.lhs = std::abs(psi.dot(op * psi));
  out.mid = Eigen::JacobiSVD<Eigen::MatrixXcd>(op).singularValues()(0);
  out.rhs = op.norm();
  out.pass = out.lhs <= out.mid + 1e-12 && out.mid + 1e-12 <= out.rhs + 1e-12;
  return out;
}

CommutatorCheck commutator_frobenius_check(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows() || b.rows() != b.cols()) {
    throw std::domain_error("commutator_frobenius_check: need equal square shapes");
  }
  CommutatorCheck out;
  out.lhs = (a * b - b * a).squaredNorm();
  out.rhs = 2.0 * a.squaredNorm() * b.squaredNorm();
  out.pass = out.lhs <= out.rhs + 1e-10;
  return out;
}

std::vector<SweepPoint> error_vs_m_sweep(const SnapshotSeries& truth, const SweepRequest& request,
                                         std::size_t threads) {
  const std::string labels[] = {request.row};
  const SnapshotSeries row = truth.select(labels);
  if (request.final_column >= row.columns()) {
    throw std::domain_error(fmt::format("error_vs_m_sweep: final column {} beyond the {} recorded snapshots",
                                        request.final_column, row.columns()));
  }
  const cplx target = row.values(0, static_cast<Eigen::Index>(request.final_column));
  const double t_final = row.time(request.final_column);

  std::vector<SweepPoint> points(request.m_values.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    SweepPoint& p = points[i];
    p.m = request.m_values[i];
    if (p.m < request.params.min_window() || p.m > row.columns()) {
      p.skipped = true;
      p.notice = fmt::format("m = {} skipped: {} needs {} <= m <= {}", p.m, request.params.describe(),
                             request.params.min_window(), row.columns());
      p.error = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    const IHODMDModel model = fit_ihodmd(row, p.m, request.params, request.policy);
    if (!model.failures().empty()) {
      p.skipped = true;
      p.notice = fmt::format("m = {} skipped: {}", p.m, model.failures().front());
      p.error = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    p.error = std::abs(target - predict_ihodmd(model, t_final, request.readout)(0));
  });
  return points;
}

}  // namespace qdmd
