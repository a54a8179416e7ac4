#include "oobgini/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oobgini/csv.hpp"
#include "oobgini/errors.hpp"
#include "oobgini/numfmt.hpp"
#include "oobgini/rng.hpp"

namespace oobgini {

namespace {

constexpr int kLevelCap = 64;

bool is_missing(const std::string& token) { return token.empty() || token == "NA"; }

bool parse_double(const std::string& token, double* out) {
  if (token.empty()) return false;
  const char* begin = token.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + token.size()) return false;
  if (!std::isfinite(v)) return false;
  *out = v;
  return true;
}

}  // namespace

int Dataset::feature_index(const std::string& name) const {
  for (int j = 0; j < n_features(); ++j)
    if (features[j].name == name) return j;
  return -1;
}

void Dataset::validate() const {
  const std::size_t n_rows = response.size();
  std::set<std::string> names;
  for (const auto& f : features) {
    if (!names.insert(f.name).second) throw DomainError("duplicate feature name: " + f.name);
    if (f.size() != n_rows)
      throw DomainError("feature '" + f.name + "' length does not match response length");
    if (f.kind.is_categorical()) {
      if (f.kind.level_count < 2)
        throw DomainError("categorical feature '" + f.name + "' needs at least 2 levels");
      for (auto c : f.codes)
        if (c < 0 || c >= f.kind.level_count)
          throw DomainError("feature '" + f.name + "' has code outside declared levels");
    }
  }
  for (auto y : response)
    if (y != 0 && y != 1) throw DomainError("response contains a value other than 0 and 1");
}

Dataset load_csv_text(const std::string& text, const LoadOptions& options,
                      LoadReport* report) {
  const CsvSchema& schema = options.schema;
  const std::string& response_column = options.response_column;
  CsvTable table = parse_csv(text);

  int response_idx = -1;
  for (std::size_t j = 0; j < table.header.size(); ++j)
    if (table.header[j] == response_column) response_idx = static_cast<int>(j);
  if (response_idx < 0)
    throw SchemaError("response column '" + response_column + "' not found in header");

  // Feature columns to materialize, in header order.
  std::vector<std::size_t> feature_cols;
  if (options.columns.empty()) {
    for (std::size_t j = 0; j < table.header.size(); ++j)
      if (static_cast<int>(j) != response_idx) feature_cols.push_back(j);
  } else {
    for (const auto& name : options.columns) {
      auto it = std::find(table.header.begin(), table.header.end(), name);
      if (it == table.header.end())
        throw SchemaError("selected column '" + name + "' not found in header");
      const auto j = static_cast<std::size_t>(it - table.header.begin());
      if (static_cast<int>(j) == response_idx)
        throw SchemaError("response column cannot be selected as a feature");
      feature_cols.push_back(j);
    }
  }
  if (feature_cols.empty()) throw SchemaError("no feature columns left");

  for (const auto& [name, _] : schema.kinds) {
    if (name == response_column) continue;
    if (std::find(table.header.begin(), table.header.end(), name) == table.header.end())
      throw SchemaError("schema column '" + name + "' not found in header");
  }

  // Complete-case filter over the kept columns and the response.
  std::vector<std::size_t> relevant = feature_cols;
  relevant.push_back(static_cast<std::size_t>(response_idx));
  std::vector<std::size_t> keep;
  int dropped = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    bool has_missing = false;
    for (std::size_t j : relevant)
      if (is_missing(table.rows[r][j])) { has_missing = true; break; }
    if (has_missing) {
      if (options.missing == MissingPolicy::kError)
        throw CsvParseError("missing value at line " + std::to_string(table.row_lines[r]) +
                            " (use the drop-missing option for complete-case filtering)");
      ++dropped;
    } else {
      keep.push_back(r);
    }
  }
  if (report) report->rows_dropped_missing = dropped;
  if (keep.empty()) throw DomainError("no rows");

  Dataset d;
  d.response.reserve(keep.size());
  for (std::size_t r : keep) {
    const std::string& tok = table.rows[r][response_idx];
    if (tok == "0") d.response.push_back(0);
    else if (tok == "1") d.response.push_back(1);
    else
      throw DomainError("non-binary response value '" + tok + "' at line " +
                        std::to_string(table.row_lines[r]));
  }

  for (std::size_t j : feature_cols) {
    const std::string& name = table.header[j];

    FeatureType declared;
    auto it = schema.kinds.find(name);
    if (it != schema.kinds.end()) {
      declared = it->second;
    } else {
      declared = FeatureType::kContinuous;
      double tmp;
      for (std::size_t r : keep)
        if (!parse_double(table.rows[r][j], &tmp)) { declared = FeatureType::kCategorical; break; }
    }

    Feature f;
    f.name = name;
    if (declared == FeatureType::kContinuous) {
      f.kind = FeatureKind::continuous();
      f.values.reserve(keep.size());
      for (std::size_t r : keep) {
        double v;
        if (!parse_double(table.rows[r][j], &v))
          throw CsvParseError("column '" + name + "': cannot parse '" + table.rows[r][j] +
                              "' as a number at line " + std::to_string(table.row_lines[r]));
        f.values.push_back(v);
      }
    } else {
      std::set<std::string> distinct;
      for (std::size_t r : keep) distinct.insert(table.rows[r][j]);
      if (distinct.size() > static_cast<std::size_t>(kLevelCap))
        throw SchemaError("column '" + name + "' has " + std::to_string(distinct.size()) +
                          " distinct levels, cap is " + std::to_string(kLevelCap));
      if (distinct.size() < 2)
        throw SchemaError("categorical column '" + name + "' needs at least 2 distinct levels");
      f.levels.assign(distinct.begin(), distinct.end());  // lexicographic
      std::map<std::string, std::int32_t> code_of;
      for (std::size_t k = 0; k < f.levels.size(); ++k)
        code_of[f.levels[k]] = static_cast<std::int32_t>(k);
      f.kind = FeatureKind::categorical(static_cast<int>(f.levels.size()));
      f.codes.reserve(keep.size());
      for (std::size_t r : keep) f.codes.push_back(code_of[table.rows[r][j]]);
    }
    d.features.push_back(std::move(f));
  }

  d.validate();
  return d;
}

Dataset load_csv_text(const std::string& text, const CsvSchema& schema,
                      const std::string& response_column, MissingPolicy missing,
                      LoadReport* report) {
  LoadOptions options;
  options.schema = schema;
  options.response_column = response_column;
  options.missing = missing;
  return load_csv_text(text, options, report);
}

Dataset load_csv(const std::string& path, const LoadOptions& options, LoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_csv_text(buf.str(), options, report);
}

Dataset load_csv(const std::string& path, const CsvSchema& schema,
                 const std::string& response_column, MissingPolicy missing, LoadReport* report) {
  LoadOptions options;
  options.schema = schema;
  options.response_column = response_column;
  options.missing = missing;
  return load_csv(path, options, report);
}

Dataset shuffle_feature(const Dataset& d, const std::string& feature, std::uint64_t seed,
                        const std::string& suffix) {
  int j = d.feature_index(feature);
  if (j < 0) throw DomainError("unknown feature name: " + feature);

  Dataset out = d;
  Feature copy = d.features[j];
  copy.name = feature + suffix;
  if (out.feature_index(copy.name) >= 0)
    throw DomainError("feature name already exists: " + copy.name);

  auto rng = make_engine(seed);
  if (copy.kind.is_categorical()) shuffle_inplace(copy.codes, rng);
  else shuffle_inplace(copy.values, rng);

  out.features.push_back(std::move(copy));
  out.validate();
  return out;
}

std::string decode_value(const Feature& f, int row) {
  if (f.kind.is_categorical()) return f.levels.at(f.codes.at(row));
  return to_string_shortest(f.values.at(row));
}

CsvSchema parse_schema_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("schema json: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("schema json must be an object of column -> kind");
  CsvSchema schema;
  for (auto& [name, value] : j.items()) {
    if (!value.is_string())
      throw SchemaError("schema entry '" + name + "' must be \"continuous\" or \"categorical\"");
    std::string kind = value.get<std::string>();
    if (kind == "continuous") schema.kinds[name] = FeatureType::kContinuous;
    else if (kind == "categorical") schema.kinds[name] = FeatureType::kCategorical;
    else
      throw SchemaError("schema entry '" + name + "': unknown kind '" + kind + "'");
  }
  return schema;
}

}  // namespace oobgini
