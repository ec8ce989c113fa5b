#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qdmd {

/// N x (M+1) record of observable expectations on the uniform grid
/// t_n = n * dt, n = 0..M (column n holds snapshot n+1 in 1-based notation).
struct SnapshotSeries {
  double dt = 0.0;
  Eigen::MatrixXcd values;          ///< rows = observables, columns = time
  std::vector<std::string> labels;  ///< one per row
  std::vector<bool> complex_rows;   ///< rows serialized as <label>.re/<label>.im

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t columns() const { return static_cast<std::size_t>(values.cols()); }
  double time(std::size_t column) const { return dt * static_cast<double>(column); }
  std::vector<double> times() const;

  std::optional<std::size_t> find(const std::string& label) const;
  std::size_t index_of(const std::string& label) const;  ///< throws std::out_of_range
  SnapshotSeries select(std::span<const std::string> row_labels) const;
  SnapshotSeries leading_columns(std::size_t count) const;

  /// Throws std::invalid_argument when shape/metadata are inconsistent.
  void validate() const;
};

/// CSV with header `t,<label>,...`; complex rows as `<label>.re,<label>.im`.
void write_csv(std::ostream& os, const SnapshotSeries& series);
void write_csv(const std::filesystem::path& path, const SnapshotSeries& series);
SnapshotSeries read_csv(std::istream& is);
SnapshotSeries read_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal form used for every numeric CSV/JSON field.
std::string format_double(double v);

}  // namespace qdmd
