#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bechdel::csv {

// RFC 4180 style: comma separated, double-quoted fields may contain commas,
// doubled quotes and newlines. CRLF and LF line endings are both accepted.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based source line where each row starts (for error messages).
  std::vector<std::size_t> row_lines;

  std::optional<std::size_t> find_column(std::string_view name) const;
  // Throws IngestError(kInvalid) naming the file when the column is absent.
  std::size_t require_column(std::string_view name, std::string_view source) const;
};

std::vector<std::vector<std::string>> parse_rows(std::string_view text,
                                                 std::vector<std::size_t>* row_lines = nullptr);

// First row becomes the header. Fully blank rows are dropped.
Table parse_table(std::string_view text);

// Reads a whole file; throws IngestError(kMissing) if it cannot be opened.
std::string read_file(const std::string& path);
Table read_table(const std::string& path);

std::string escape_field(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace bechdel::csv
