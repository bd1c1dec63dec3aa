#pragma once

#include "plsforge/types.hpp"

#include <string>
#include <vector>

namespace plsforge {

struct CsvTable {
  std::vector<std::string> header; // empty when the file had no header row
  Matrix values;
};

// Comma-separated numeric table.  A header row is auto-detected when any
// first-row field fails to parse as a number.  Ragged rows and non-numeric
// data cells raise io_error with the 1-based line number.
CsvTable read_csv(const std::string& path);

// Shortest round-trip representation per value, '\n' line endings, optional
// header row.  header must be empty or match the column count.
void write_csv(const std::string& path, const Matrix& m,
               const std::vector<std::string>& header = {});

// Single-column label file, one label per line; a first line spelling
// "label" (case-insensitive) is treated as a header and skipped.
std::vector<std::string> read_labels(const std::string& path);
void write_labels(const std::string& path, const std::vector<std::string>& labels);

std::string format_double(double v); // shortest round-trip text

} // namespace plsforge
