#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace d2rl {

/// Numeric table written as CSV: `# key=value` metadata lines, one header
/// row, then comma-separated rows of shortest round-trip decimals. The
/// first column is `step` and strictly increases.
struct RunRecord {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of `name`; throws std::out_of_range when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const noexcept;
  std::vector<double> column_values(std::string_view name) const;
  /// Value of a metadata key; throws std::out_of_range when absent.
  const std::string& meta(std::string_view key) const;

  /// Throws std::invalid_argument on ragged rows, non-finite
  /// values or non-increasing steps.
  void validate() const;

  std::string to_csv() const;
  void write(const std::filesystem::path& path) const;

  /// Throws ParseError with the offending line number.
  static RunRecord from_csv(std::string_view text);
  static RunRecord read(const std::filesystem::path& path);

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Writes a header row and rows of strings as CSV, creating parent directories.
void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               std::span<const std::vector<std::string>> rows);

}  // namespace d2rl
