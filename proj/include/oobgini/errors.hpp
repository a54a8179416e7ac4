#pragma once

#include <stdexcept>
#include <string>

namespace oobgini {

// Malformed input file (bad CSV structure, unparseable field).
class CsvParseError : public std::runtime_error {
 public:
  explicit CsvParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Declared column types do not match the data (unknown column, level cap, ...).
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Semantically invalid request (non-binary response, single-class fit, ...).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace oobgini
