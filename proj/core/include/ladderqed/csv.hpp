#pragma once

// Comma-separated output: mandatory header, '.' decimal point, doubles in
// scientific notation with 17 significant digits, LF line endings.

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

namespace ladderqed {

using CsvCell = std::variant<double, long, std::string>;

std::string format_double(double value);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  void row(const std::vector<CsvCell>& cells);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::size_t columns_;
  std::ofstream out_;
};

}  // namespace ladderqed
