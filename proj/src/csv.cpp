#include "gfbsde/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace gfbsde {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), columns_(header.size()) {
  if (!out_) throw ConfigError("cannot open output file: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    out_ << (i ? "," : "") << header[i];
  }
  out_ << "\n";
}

void CsvWriter::write_cells(const double* data, std::size_t n) {
  if (n != columns_) throw ConfigError("csv row width does not match header");
  for (std::size_t i = 0; i < n; ++i) {
    out_ << (i ? "," : "") << format_g17(data[i]);
  }
  out_ << "\n";
}

void CsvWriter::row(std::initializer_list<double> cells) { write_cells(cells.begin(), cells.size()); }
void CsvWriter::row(const std::vector<double>& cells) { write_cells(cells.data(), cells.size()); }

ReportWriter::ReportWriter(const std::string& path) : out_(path) {
  if (!out_) throw ConfigError("cannot open report file: " + path);
}

void ReportWriter::kv(const std::string& key, double value) {
  out_ << key << " = " << format_g17(value) << "\n";
}

void ReportWriter::kv(const std::string& key, const std::string& value) {
  out_ << key << " = " << value << "\n";
}

std::vector<std::pair<double, double>> read_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open input file: " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (first) {
      first = false;  // header
      continue;
    }
    std::istringstream ls(line);
    std::string a, b;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',')) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected two comma-separated columns");
    }
    rows.emplace_back(std::strtod(a.c_str(), nullptr), std::strtod(b.c_str(), nullptr));
  }
  return rows;
}

}  // namespace gfbsde
