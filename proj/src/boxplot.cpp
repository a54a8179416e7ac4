#include "oobgini/boxplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "oobgini/csv.hpp"
#include "oobgini/errors.hpp"
#include "oobgini/numfmt.hpp"
#include "oobgini/stats.hpp"

namespace oobgini {

int LongTable::column_index(const std::string& name) const {
  for (std::size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return static_cast<int>(j);
  return -1;
}

namespace {

LongTable from_csv_table(CsvTable csv) {
  LongTable table;
  table.columns = csv.header;
  const int sc = table.column_index("score");
  if (sc < 0) throw DomainError("long csv needs a 'score' column");
  if (csv.rows.empty()) throw DomainError("long csv has no rows");
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::string& tok = csv.rows[r][sc];
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v))
      throw CsvParseError("cannot parse score '" + tok + "' at line " +
                          std::to_string(csv.row_lines[r]));
    table.scores.push_back(v);
    table.rows.push_back(std::move(csv.rows[r]));
  }
  return table;
}

}  // namespace

LongTable parse_long_csv(const std::string& text) {
  return from_csv_table(parse_csv(text, /*skip_comment_lines=*/true));
}

LongTable read_long_csv(const std::string& path) {
  return from_csv_table(read_csv_file(path, /*skip_comment_lines=*/true));
}

namespace {

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Ticks {
  std::vector<double> values;
};

Ticks nice_ticks(double lo, double hi, int target) {
  Ticks t;
  if (!(hi > lo)) {
    t.values.push_back(lo);
    return t;
  }
  const double raw_step = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw_step) {
      step = mag * mult;
      break;
    }
  }
  const long first = static_cast<long>(std::ceil(lo / step));
  const long last = static_cast<long>(std::floor(hi / step + 1e-9));
  for (long k = first; k <= last; ++k) {
    double v = static_cast<double>(k) * step;
    if (k == 0) v = 0.0;  // avoid -0
    t.values.push_back(v);
  }
  return t;
}

}  // namespace

std::string render_boxplot_svg(const LongTable& table, const std::string& panel_key,
                               const std::string& box_key,
                               const nlohmann::ordered_json& config) {
  const int panel_col = table.column_index(panel_key);
  if (panel_col < 0) throw DomainError("unknown panel key column '" + panel_key + "'");
  const int box_col = table.column_index(box_key);
  if (box_col < 0) throw DomainError("unknown box key column '" + box_key + "'");

  std::vector<std::string> panels, boxes;
  std::map<std::pair<std::string, std::string>, std::vector<double>> groups;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& pv = table.rows[r][panel_col];
    const std::string& bv = table.rows[r][box_col];
    if (std::find(panels.begin(), panels.end(), pv) == panels.end()) panels.push_back(pv);
    if (std::find(boxes.begin(), boxes.end(), bv) == boxes.end()) boxes.push_back(bv);
    groups[{pv, bv}].push_back(table.scores[r]);
  }

  constexpr double kBoxSlot = 46.0;
  constexpr double kBoxHalf = 14.0;
  constexpr double kPlotH = 220.0;
  constexpr double kLeft = 58.0;
  constexpr double kTop = 34.0;
  constexpr double kBottom = 42.0;
  constexpr double kPanelGap = 26.0;

  const double panel_w = kBoxSlot * static_cast<double>(boxes.size());
  const double total_w =
      kLeft + (panel_w + kPanelGap) * static_cast<double>(panels.size()) - kPanelGap + 12.0;
  const double total_h = kTop + kPlotH + kBottom;

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f2(total_w) + "\" height=\"" +
         f2(total_h) + "\" viewBox=\"0 0 " + f2(total_w) + " " + f2(total_h) + "\">\n";
  svg += "<!-- oobgini plot " + config.dump() + " -->\n";
  svg += "<style>text{font-family:sans-serif;font-size:11px}.t{font-size:12px;font-weight:bold}"
         "line,rect{stroke:#333;fill:none}.box{fill:#cfe2f3}.median{stroke:#b00;stroke-width:1.5}"
         ".zero{stroke:#999;stroke-dasharray:3 3}.out{fill:#333;stroke:none}</style>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const double px = kLeft + (panel_w + kPanelGap) * static_cast<double>(pi);

    // Per-panel scale over whiskers and outliers, zero always included.
    double lo = 0.0, hi = 0.0;
    std::vector<BoxStats> stats(boxes.size());
    std::vector<bool> present(boxes.size(), false);
    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
      auto it = groups.find({panels[pi], boxes[bi]});
      if (it == groups.end()) continue;
      present[bi] = true;
      stats[bi] = box_stats(it->second);
      lo = std::min({lo, stats[bi].whisker_lo});
      hi = std::max({hi, stats[bi].whisker_hi});
      for (double o : stats[bi].outliers) {
        lo = std::min(lo, o);
        hi = std::max(hi, o);
      }
    }
    if (!(hi > lo)) hi = lo + 1.0;
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
    const auto y_of = [&](double v) { return kTop + kPlotH * (hi - v) / (hi - lo); };

    svg += "<g>\n";
    svg += "<text class=\"t\" x=\"" + f2(px + panel_w / 2) + "\" y=\"" + f2(kTop - 12.0) +
           "\" text-anchor=\"middle\">" + panels[pi] + "</text>\n";
    svg += "<rect x=\"" + f2(px) + "\" y=\"" + f2(kTop) + "\" width=\"" + f2(panel_w) +
           "\" height=\"" + f2(kPlotH) + "\"/>\n";

    for (double tick : nice_ticks(lo, hi, 5).values) {
      const double ty = y_of(tick);
      svg += "<line x1=\"" + f2(px - 4.0) + "\" x2=\"" + f2(px) + "\" y1=\"" + f2(ty) +
             "\" y2=\"" + f2(ty) + "\"/>\n";
      svg += "<text x=\"" + f2(px - 7.0) + "\" y=\"" + f2(ty + 3.5) +
             "\" text-anchor=\"end\">" + to_string_shortest(tick) + "</text>\n";
    }
    if (lo < 0.0 && hi > 0.0)
      svg += "<line class=\"zero\" x1=\"" + f2(px) + "\" x2=\"" + f2(px + panel_w) + "\" y1=\"" +
             f2(y_of(0.0)) + "\" y2=\"" + f2(y_of(0.0)) + "\"/>\n";

    for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
      const double cx = px + kBoxSlot * (static_cast<double>(bi) + 0.5);
      svg += "<text x=\"" + f2(cx) + "\" y=\"" + f2(kTop + kPlotH + 16.0) +
             "\" text-anchor=\"middle\">" + boxes[bi] + "</text>\n";
      if (!present[bi]) continue;
      const BoxStats& b = stats[bi];
      // Box-local coordinates so identical data renders identical glyphs.
      svg += "<g transform=\"translate(" + f2(cx) + ",0)\">\n";
      svg += "<line x1=\"0.00\" x2=\"0.00\" y1=\"" + f2(y_of(b.whisker_hi)) + "\" y2=\"" +
             f2(y_of(b.q3)) + "\"/>\n";
      svg += "<line x1=\"0.00\" x2=\"0.00\" y1=\"" + f2(y_of(b.q1)) + "\" y2=\"" +
             f2(y_of(b.whisker_lo)) + "\"/>\n";
      svg += "<line x1=\"" + f2(-kBoxHalf / 2) + "\" x2=\"" + f2(kBoxHalf / 2) + "\" y1=\"" +
             f2(y_of(b.whisker_hi)) + "\" y2=\"" + f2(y_of(b.whisker_hi)) + "\"/>\n";
      svg += "<line x1=\"" + f2(-kBoxHalf / 2) + "\" x2=\"" + f2(kBoxHalf / 2) + "\" y1=\"" +
             f2(y_of(b.whisker_lo)) + "\" y2=\"" + f2(y_of(b.whisker_lo)) + "\"/>\n";
      svg += "<rect class=\"box\" x=\"" + f2(-kBoxHalf) + "\" y=\"" + f2(y_of(b.q3)) +
             "\" width=\"" + f2(2 * kBoxHalf) + "\" height=\"" + f2(y_of(b.q1) - y_of(b.q3)) +
             "\"/>\n";
      svg += "<line class=\"median\" x1=\"" + f2(-kBoxHalf) + "\" x2=\"" + f2(kBoxHalf) +
             "\" y1=\"" + f2(y_of(b.median)) + "\" y2=\"" + f2(y_of(b.median)) + "\"/>\n";
      for (double o : b.outliers)
        svg += "<circle class=\"out\" cx=\"0.00\" cy=\"" + f2(y_of(o)) + "\" r=\"1.8\"/>\n";
      svg += "</g>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace oobgini
