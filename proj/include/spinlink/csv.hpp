#pragma once

// Minimal CSV: header row, fixed column order, numbers with 12 significant
// digits. Cells never contain commas, quotes or newlines.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spinlink/types.hpp"

namespace spinlink {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error("CSV has no column '" + name + "'");
  }

  std::vector<double> numbers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(std::stod(r[c]));
    return out;
  }
};

/// Builds one row cell by cell.
class CsvRow {
 public:
  CsvRow& operator<<(double v) { return add(format_number(v)); }
  CsvRow& operator<<(int v) { return add(std::to_string(v)); }
  CsvRow& operator<<(std::size_t v) { return add(std::to_string(v)); }
  CsvRow& operator<<(bool v) { return add(v ? "1" : "0"); }
  CsvRow& operator<<(const std::string& v) { return add(v); }
  CsvRow& operator<<(const char* v) { return add(v); }

  std::vector<std::string> take() { return std::move(cells_); }

 private:
  CsvRow& add(std::string s) {
    require(s.find_first_of(",\"\n\r") == std::string::npos, "CSV cell contains a separator: " + s);
    cells_.push_back(std::move(s));
    return *this;
  }
  std::vector<std::string> cells_;
};

inline std::string to_csv(const CsvTable& t) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) {
    require(r.size() == t.header.size(), "CSV row width differs from header");
    line(r);
  }
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "CSV is empty");
  t.header = split_csv_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    require(cells.size() == t.header.size(), "CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                                 std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  require(static_cast<bool>(in), "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Write-temp-then-rename, so readers never see a partial file.
inline void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), "cannot write " + tmp.string());
    out << content;
    out.flush();
    require(static_cast<bool>(out), "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

inline CsvTable read_csv(const std::filesystem::path& p) { return parse_csv(read_file(p)); }

inline void write_csv(const std::filesystem::path& p, const CsvTable& t) { write_file_atomic(p, to_csv(t)); }

}  // namespace spinlink
