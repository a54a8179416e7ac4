#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace oobgini {

// Long-format score table: one row per (replication, feature, measure).
struct LongTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<double> scores;  // parsed "score" column, one per row

  int column_index(const std::string& name) const;
};

// Reads a long-format CSV, skipping '#' envelope lines. Requires a "score"
// column; fails on empty input.
LongTable read_long_csv(const std::string& path);
LongTable parse_long_csv(const std::string& text);

// One panel per distinct panel_key value, one box per distinct box_key value
// (both in first-appearance order, box order shared across panels). Boxes
// show median, quartiles, whiskers at 1.5*IQR and outlier dots. Output is
// byte-deterministic for fixed input; the config object is embedded as a
// leading comment.
std::string render_boxplot_svg(const LongTable& table, const std::string& panel_key,
                               const std::string& box_key,
                               const nlohmann::ordered_json& config);

}  // namespace oobgini
