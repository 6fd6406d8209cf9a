#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wsp/matrix.hpp"

namespace wsp::cli {

/// Shortest round-trip is not required; 17 significant digits always is.
std::string format_double(double v);

/// Quotes a field when it contains a delimiter, quote or line break.
std::string csv_field(std::string_view s);

/// Splits one RFC-4180 record. Quoted fields may contain commas and "".
std::vector<std::string> split_csv_record(std::string_view line);

/// Reads a numeric matrix. `header` skips the first record. Cells that do
/// not parse raise UsageError naming the 1-based row and column.
Matrix read_matrix_csv(const std::filesystem::path& path, bool header = false);

/// Writes row-major with no header unless `names` is non-empty.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& names = {});

/// Simple table writer: header row then one record per row.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add(std::vector<std::string> row);
  std::size_t size() const noexcept { return rows_.size(); }
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes `content` to `path`, raising UsageError on failure.
void write_text(const std::filesystem::path& path, std::string_view content);

}  // namespace wsp::cli
