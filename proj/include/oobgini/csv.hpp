#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace oobgini {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;  // file line where each row starts, for error messages
};

// RFC-4180 subset: header row required, ',' separator, '"' quoting with ""
// escapes, LF or CRLF line ends. With skip_comment_lines, lines starting
// with '#' outside quoted fields are ignored (used by the tool's own output
// envelopes).
CsvTable parse_csv(std::string_view text, bool skip_comment_lines = false);
CsvTable read_csv_file(const std::string& path, bool skip_comment_lines = false);

// Quotes a field if it contains separator, quote or newline characters.
std::string csv_quote(std::string_view field);

}  // namespace oobgini
