#include "plsforge/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace plsforge {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

} // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);

  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  Index cols = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (cols < 0) {
      cols = static_cast<Index>(fields.size());
      bool numeric = true;
      std::vector<double> first(fields.size());
      for (std::size_t j = 0; j < fields.size(); ++j)
        if (!parse_double(fields[j], first[j])) {
          numeric = false;
          break;
        }
      if (numeric) {
        rows.push_back(std::move(first));
      } else {
        for (auto f : fields) table.header.emplace_back(f);
      }
      continue;
    }
    if (static_cast<Index>(fields.size()) != cols)
      throw io_error(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                     " fields, got " + std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j)
      if (!parse_double(fields[j], row[j]))
        throw io_error(path + ":" + std::to_string(lineno) + ": non-numeric field '" +
                       std::string(fields[j]) + "'");
    rows.push_back(std::move(row));
  }
  if (cols < 0) throw io_error(path + ": empty CSV");

  table.values.resize(static_cast<Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < cols; ++j)
      table.values(static_cast<Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
  return table;
}

void write_csv(const std::string& path, const Matrix& m,
               const std::vector<std::string>& header) {
  if (!header.empty() && static_cast<Index>(header.size()) != m.cols())
    throw invalid_input("write_csv: header width mismatch");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j)
      out << (j ? "," : "") << header[j];
    out << '\n';
  }
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
  if (!out) throw io_error("write failed: " + path);
}

std::vector<std::string> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::vector<std::string> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.find(',') != std::string_view::npos)
      throw io_error(path + ":" + std::to_string(lineno) + ": labels file must be one column");
    std::string s(t);
    if (labels.empty() && lineno == 1) {
      std::string low = s;
      std::transform(low.begin(), low.end(), low.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (low == "label") continue;
    }
    labels.push_back(std::move(s));
  }
  if (labels.empty()) throw io_error(path + ": no labels");
  return labels;
}

void write_labels(const std::string& path, const std::vector<std::string>& labels) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw io_error("cannot write " + path);
  out << "label\n";
  for (const auto& s : labels) out << s << '\n';
  if (!out) throw io_error("write failed: " + path);
}

} // namespace plsforge
