#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hullas::csv {

/// Numeric CSV table. Empty cells read as NaN.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Reads a comma-separated numeric table. The first line is taken as a
/// header when it does not parse as numbers (or unconditionally when
/// `require_header` is set). Every row must have the same number of cells.
Table read(const std::filesystem::path& path, bool require_header = false);
Table parse(const std::string& text, bool require_header = false);

/// Shortest round-trippable decimal (17 significant digits, %.17g).
std::string format_double(double value);

void write(const std::filesystem::path& path, const Table& table);

}  // namespace hullas::csv
