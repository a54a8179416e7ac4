#include <doctest.h>

#include <cmath>

#include "oobgini/boxplot.hpp"
#include "oobgini/errors.hpp"
#include "oobgini/stats.hpp"

using namespace oobgini;

TEST_CASE("quantiles use linear interpolation") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(quantile_sorted(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_sorted(v, 0.25) == doctest::Approx(1.75));
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 4.0);
  const std::vector<double> single{7};
  CHECK(quantile_sorted(single, 0.3) == 7.0);
}

TEST_CASE("box_stats symmetric three points") {
  auto b = box_stats({-1, 0, 1});
  CHECK(b.median == 0.0);
  CHECK(b.q1 == -0.5);
  CHECK(b.q3 == 0.5);
  CHECK(b.whisker_lo == -1.0);
  CHECK(b.whisker_hi == 1.0);
  CHECK(b.outliers.empty());
}

TEST_CASE("box_stats flags outliers beyond 1.5 IQR") {
  auto b = box_stats({1, 2, 3, 4, 5, 6, 7, 8, 100});
  CHECK(b.outliers == std::vector<double>{100});
  CHECK(b.whisker_hi == 8.0);
}

TEST_CASE("mean_std_error") {
  auto ms = mean_std_error(std::vector<double>{1, 2, 3, 4});
  CHECK(ms.mean == doctest::Approx(2.5));
  CHECK(ms.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

namespace {

const char* kLongCsv =
    "# oobgini simulate {\"seed\":1}\n"
    "replication,feature,measure,score\n"
    "0,X1,mdi,-1\n"
    "1,X1,mdi,0\n"
    "2,X1,mdi,1\n"
    "0,X2,mdi,-1\n"
    "1,X2,mdi,0\n"
    "2,X2,mdi,1\n";

}  // namespace

TEST_CASE("long csv parsing skips the config envelope") {
  LongTable t = parse_long_csv(kLongCsv);
  REQUIRE(t.rows.size() == 6);
  CHECK(t.scores[0] == -1.0);
  CHECK(t.column_index("feature") == 1);
  CHECK_THROWS_AS(parse_long_csv("replication,feature,measure,score\n"), DomainError);
  CHECK_THROWS_AS(parse_long_csv("a,b\n1,2\n"), DomainError);
  CHECK_THROWS_AS(parse_long_csv("feature,score\nX1,abc\n"), CsvParseError);
}

TEST_CASE("svg output is deterministic and median sits mid-box for symmetric data") {
  LongTable t = parse_long_csv(kLongCsv);
  nlohmann::ordered_json config{{"input", "test"}};
  const std::string svg = render_boxplot_svg(t, "measure", "feature", config);
  CHECK(svg == render_boxplot_svg(t, "measure", "feature", config));
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("oobgini plot") != std::string::npos);

  // identical groups produce byte-identical glyphs
  const auto first_glyph = svg.find("<g transform=");
  REQUIRE(first_glyph != std::string::npos);
  const auto second_glyph = svg.find("<g transform=", first_glyph + 1);
  REQUIRE(second_glyph != std::string::npos);
  auto inner = [&](std::size_t start) {
    const auto open = svg.find(">", start);
    const auto close = svg.find("</g>", start);
    return svg.substr(open + 1, close - open - 1);
  };
  CHECK(inner(first_glyph) == inner(second_glyph));

  // symmetric data: the median line is the vertical center of the box rect
  const auto rect_pos = svg.find("<rect class=\"box\"");
  REQUIRE(rect_pos != std::string::npos);
  auto attr = [&](std::size_t from, const std::string& name) {
    const auto k = svg.find(name + "=\"", from);
    REQUIRE(k != std::string::npos);
    return std::stod(svg.substr(k + name.size() + 2));
  };
  const double box_y = attr(rect_pos, "y");
  const double box_h = attr(rect_pos, "height");
  const auto median_pos = svg.find("<line class=\"median\"", rect_pos);
  REQUIRE(median_pos != std::string::npos);
  const double median_y = attr(median_pos, "y1");
  CHECK(median_y == doctest::Approx(box_y + box_h / 2).epsilon(1e-6));
}

TEST_CASE("render fails on unknown group keys") {
  LongTable t = parse_long_csv(kLongCsv);
  CHECK_THROWS_AS(render_boxplot_svg(t, "nope", "feature", {}), DomainError);
  CHECK_THROWS_AS(render_boxplot_svg(t, "measure", "nope", {}), DomainError);
}
