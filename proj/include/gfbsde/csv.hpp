#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "gfbsde/errors.hpp"

namespace gfbsde {

/// Format with 17 significant digits (round-trip exact for doubles).
std::string format_g17(double v);

/// CSV with a one-line header and fixed column order; numeric cells are
/// written round-trip exact so reruns diff byte-identically.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(std::initializer_list<double> cells);
  void row(const std::vector<double>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
  void write_cells(const double* data, std::size_t n);
};

/// Sidecar report in key = value lines.
class ReportWriter {
 public:
  explicit ReportWriter(const std::string& path);
  void kv(const std::string& key, double value);
  void kv(const std::string& key, const std::string& value);

 private:
  std::ofstream out_;
};

/// Read a two-column (x, value) CSV with a one-line header.
std::vector<std::pair<double, double>> read_xy_csv(const std::string& path);

}  // namespace gfbsde
