#include "oobgini/csv.hpp"

#include <fstream>
#include <sstream>

#include "oobgini/errors.hpp"

namespace oobgini {

namespace {

std::string row_msg(int line, const std::string& what) {
  return "csv parse error at line " + std::to_string(line) + ": " + what;
}

}  // namespace

CsvTable parse_csv(std::string_view text, bool skip_comment_lines) {
  // Strip a UTF-8 BOM.
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  CsvTable table;
  std::size_t pos = 0;
  int line = 1;
  bool saw_header = false;

  while (pos < text.size()) {
    if (skip_comment_lines && text[pos] == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      if (pos < text.size()) ++pos;
      ++line;
      continue;
    }

    const int record_line = line;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool quoted_field = false;
    bool done = false;

    while (!done) {
      if (pos >= text.size()) {
        if (in_quotes) throw CsvParseError(row_msg(record_line, "unterminated quoted field"));
        break;
      }
      char c = text[pos];
      if (in_quotes) {
        if (c == '"') {
          if (pos + 1 < text.size() && text[pos + 1] == '"') {
            field += '"';
            pos += 2;
          } else {
            in_quotes = false;
            ++pos;
          }
        } else {
          if (c == '\n') ++line;
          field += c;
          ++pos;
        }
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty() || quoted_field)
            throw CsvParseError(row_msg(record_line, "unexpected '\"' inside unquoted field"));
          in_quotes = true;
          quoted_field = true;
          ++pos;
          break;
        case ',':
          fields.push_back(std::move(field));
          field.clear();
          quoted_field = false;
          ++pos;
          break;
        case '\r':
          if (pos + 1 < text.size() && text[pos + 1] == '\n') {
            pos += 2;
          } else {
            ++pos;
          }
          ++line;
          done = true;
          break;
        case '\n':
          ++pos;
          ++line;
          done = true;
          break;
        default:
          field += c;
          ++pos;
          break;
      }
    }
    fields.push_back(std::move(field));

    // A lone empty record (trailing newline) is not a row.
    if (fields.size() == 1 && fields[0].empty() && !quoted_field) continue;

    if (!saw_header) {
      table.header = std::move(fields);
      saw_header = true;
    } else {
      if (fields.size() != table.header.size())
        throw CsvParseError(row_msg(record_line,
                                    "expected " + std::to_string(table.header.size()) +
                                        " fields, got " + std::to_string(fields.size())));
      table.rows.push_back(std::move(fields));
      table.row_lines.push_back(record_line);
    }
  }

  if (!saw_header) throw CsvParseError("csv parse error: missing header row");
  return table;
}

CsvTable read_csv_file(const std::string& path, bool skip_comment_lines) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), skip_comment_lines);
}

std::string csv_quote(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

}  // namespace oobgini
