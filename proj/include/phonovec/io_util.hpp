#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace phonovec {

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text);

/// Shortest round-trip decimal representation; identical across runs.
std::string format_number(double value);

/// RFC-4180 field quoting.
std::string csv_field(std::string_view text);

/// Accumulates a CSV document row by row.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

/// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

/// Reads non-comment, non-blank lines (comments start with '#').
std::vector<std::string> read_data_lines(std::string_view text);

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Callers write
/// results into slot i so output order never depends on scheduling.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace phonovec
