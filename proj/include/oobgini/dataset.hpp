#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace oobgini {

enum class FeatureType { kContinuous, kCategorical };

struct FeatureKind {
  FeatureType type = FeatureType::kContinuous;
  int level_count = 0;  // categorical only, >= 2

  static FeatureKind continuous() { return {FeatureType::kContinuous, 0}; }
  static FeatureKind categorical(int levels) { return {FeatureType::kCategorical, levels}; }
  bool is_categorical() const { return type == FeatureType::kCategorical; }
  bool operator==(const FeatureKind&) const = default;
};

struct Feature {
  std::string name;
  FeatureKind kind;
  std::vector<double> values;       // continuous storage
  std::vector<std::int32_t> codes;  // categorical storage, in [0, level_count)
  std::vector<std::string> levels;  // code -> original token, lexicographic order

  std::size_t size() const { return kind.is_categorical() ? codes.size() : values.size(); }
};

// Immutable after construction; safe to share across concurrent tree builders.
struct Dataset {
  std::vector<Feature> features;
  std::vector<std::int8_t> response;  // 0/1

  int n() const { return static_cast<int>(response.size()); }
  int n_features() const { return static_cast<int>(features.size()); }
  int feature_index(const std::string& name) const;

  // Throws DomainError if any structural invariant is violated.
  void validate() const;
};

enum class MissingPolicy { kError, kDropRow };

// Per-column kind declarations; columns not listed are inferred (continuous
// when every value parses as a finite number, categorical otherwise).
struct CsvSchema {
  std::map<std::string, FeatureType> kinds;
};

struct LoadReport {
  int rows_dropped_missing = 0;
};

struct LoadOptions {
  CsvSchema schema;
  std::string response_column;
  MissingPolicy missing = MissingPolicy::kError;
  std::vector<std::string> columns;  // feature columns to keep; empty = all
};

// Loads a typed dataset from CSV. Missing values are the empty field and the
// literal "NA"; by default they are load errors, with MissingPolicy::kDropRow
// the affected rows are excluded (complete-case filter over the kept columns
// and the response). Categorical levels are the distinct tokens sorted
// lexicographically, coded 0..k-1; at most 64 levels per column. The response
// column must contain only "0" and "1".
Dataset load_csv(const std::string& path, const LoadOptions& options,
                 LoadReport* report = nullptr);
Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 const std::string& response_column,
                 MissingPolicy missing = MissingPolicy::kError, LoadReport* report = nullptr);

// Same, from in-memory CSV text (used by tests and the simulation harness).
Dataset load_csv_text(const std::string& text, const LoadOptions& options,
                      LoadReport* report = nullptr);
Dataset load_csv_text(const std::string& text, const CsvSchema& schema,
                      const std::string& response_column,
                      MissingPolicy missing = MissingPolicy::kError, LoadReport* report = nullptr);

// Returns a copy of `d` with one appended feature: a seeded uniform
// permutation of the source column. The appended name is source + suffix.
Dataset shuffle_feature(const Dataset& d, const std::string& feature, std::uint64_t seed,
                        const std::string& suffix = "_shuffled");

// Original token for one cell (continuous values print shortest round-trip).
std::string decode_value(const Feature& f, int row);

// Parses a {"column": "continuous"|"categorical"} JSON object.
CsvSchema parse_schema_json(const std::string& text);

}  // namespace oobgini
