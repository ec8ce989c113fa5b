#include "qdmd/snapshot_series.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qdmd {

std::string format_double(double v) { return fmt::format("{}", v); }

std::vector<double> SnapshotSeries::times() const {
  std::vector<double> t(columns());
  for (std::size_t n = 0; n < t.size(); ++n) t[n] = time(n);
  return t;
}

std::optional<std::size_t> SnapshotSeries::find(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return std::nullopt;
}

std::size_t SnapshotSeries::index_of(const std::string& label) const {
  if (auto i = find(label)) return *i;
  throw std::out_of_range("SnapshotSeries: no row labelled '" + label + "'");
}

SnapshotSeries SnapshotSeries::select(std::span<const std::string> row_labels) const {
  SnapshotSeries out;
  out.dt = dt;
  out.values.resize(static_cast<Eigen::Index>(row_labels.size()), values.cols());
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    const std::size_t src = index_of(row_labels[i]);
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(src));
    out.labels.push_back(labels[src]);
    out.complex_rows.push_back(complex_rows[src]);
  }
  return out;
}

SnapshotSeries SnapshotSeries::leading_columns(std::size_t count) const {
  if (count > columns()) {
    throw std::out_of_range("SnapshotSeries: requested " + std::to_string(count) + " columns, have " +
                            std::to_string(columns()));
  }
  SnapshotSeries out = *this;
  out.values = values.leftCols(static_cast<Eigen::Index>(count));
  return out;
}

void SnapshotSeries::validate() const {
  if (labels.size() != rows() || complex_rows.size() != rows()) {
    throw std::invalid_argument("SnapshotSeries: labels/complex flags do not match row count");
  }
  if (columns() < 1) throw std::invalid_argument("SnapshotSeries: at least one column required");
  if (!(dt > 0.0)) throw std::invalid_argument("SnapshotSeries: dt must be positive");
}

void write_csv(std::ostream& os, const SnapshotSeries& series) {
  os << 't';
  for (std::size_t i = 0; i < series.rows(); ++i) {
    if (series.complex_rows[i]) {
      os << ',' << series.labels[i] << ".re," << series.labels[i] << ".im";
    } else {
      os << ',' << series.labels[i];
    }
  }
  os << '\n';
  for (std::size_t n = 0; n < series.columns(); ++n) {
    os << format_double(series.time(n));
    for (std::size_t i = 0; i < series.rows(); ++i) {
      const auto v = series.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n));
      os << ',' << format_double(v.real());
      if (series.complex_rows[i]) os << ',' << format_double(v.imag());
    }
    os << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const SnapshotSeries& series) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(os, series);
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

SnapshotSeries read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  if (header.empty() || header[0] != "t") throw std::invalid_argument("read_csv: header must start with 't'");

  // Map CSV columns to (row, part) pairs.
  SnapshotSeries s;
  std::vector<std::pair<std::size_t, int>> column_map;  // part: 0 real-only, 1 re, 2 im
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (ends_with(h, ".re")) {
      s.labels.push_back(h.substr(0, h.size() - 3));
      s.complex_rows.push_back(true);
      column_map.emplace_back(s.labels.size() - 1, 1);
    } else if (ends_with(h, ".im")) {
      const std::string base = h.substr(0, h.size() - 3);
      if (s.labels.empty() || s.labels.back() != base || !s.complex_rows.back()) {
        throw std::invalid_argument("read_csv: '" + h + "' without preceding '" + base + ".re'");
      }
      column_map.emplace_back(s.labels.size() - 1, 2);
    } else {
      s.labels.push_back(h);
      s.complex_rows.push_back(false);
      column_map.emplace_back(s.labels.size() - 1, 0);
    }
  }

  std::vector<double> times;
  std::vector<std::vector<std::complex<double>>> columns;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("read_csv: row " + std::to_string(times.size() + 1) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
    }
    times.push_back(std::stod(cells[0]));
    std::vector<std::complex<double>> col(s.labels.size());
    for (std::size_t c = 1; c < cells.size(); ++c) {
      const auto [row, part] = column_map[c - 1];
      const double v = std::stod(cells[c]);
      if (part == 2) {
        col[row].imag(v);
      } else {
        col[row].real(v);
      }
    }
    columns.push_back(std::move(col));
  }
  if (times.empty()) throw std::invalid_argument("read_csv: no data rows");

  s.values.resize(static_cast<Eigen::Index>(s.labels.size()), static_cast<Eigen::Index>(times.size()));
  for (std::size_t n = 0; n < columns.size(); ++n) {
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
      s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) = columns[n][i];
    }
  }
  if (times.size() >= 2) {
    s.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    for (std::size_t n = 0; n < times.size(); ++n) {
      const double expected = times.front() + s.dt * static_cast<double>(n);
      if (std::abs(times[n] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
        throw std::invalid_argument("read_csv: time grid is not uniform at row " + std::to_string(n + 1));
      }
    }
  }
  return s;
}

SnapshotSeries read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_csv(is);
}

}  // namespace qdmd
