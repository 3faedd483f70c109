#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hullas/csv.hpp"
#include "hullas/error.hpp"

namespace hullas::csv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Table parse(const std::string& text, bool require_header) {
  Table table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  bool first = true;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (first) {
      first = false;
      width = cells.size();
      std::vector<double> values(cells.size());
      bool numeric = true;
      for (std::size_t i = 0; i < cells.size(); ++i) numeric = numeric && !cells[i].empty() && parse_number(cells[i], values[i]);
      if (require_header || !numeric) {
        table.header = cells;
        continue;
      }
      table.rows.push_back(std::move(values));
      continue;
    }
    if (cells.size() != width) {
      throw ParseError("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                           " cells, expected " + std::to_string(width),
                       line_offset);
    }
    std::vector<double> values(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!parse_number(cells[i], values[i])) {
        throw ParseError("CSV line " + std::to_string(line_no) + ": '" + cells[i] + "' is not a number", line_offset);
      }
    }
    table.rows.push_back(std::move(values));
  }
  return table;
}

Table read(const std::filesystem::path& path, bool require_header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), require_header);
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write CSV file '" + path.string() + "'");
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  if (!table.header.empty()) out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << (std::isnan(row[i]) ? std::string() : format_double(row[i]));
    }
    out << '\n';
  }
}

}  // namespace hullas::csv
