#include <doctest.h>

#include <cmath>

#include "oobgini/errors.hpp"
#include "oobgini/simlab.hpp"
#include "oracles.hpp"

using namespace oobgini;

TEST_CASE("gen_case produces the declared design") {
  Dataset d = gen_case(SimCase::kNull, 120, 42);
  REQUIRE(d.n() == 120);
  REQUIRE(d.n_features() == 5);
  CHECK(d.features[0].name == "X1");
  CHECK_FALSE(d.features[0].kind.is_categorical());
  CHECK(d.features[1].kind == FeatureKind::categorical(2));
  CHECK(d.features[2].kind == FeatureKind::categorical(4));
  CHECK(d.features[3].kind == FeatureKind::categorical(10));
  CHECK(d.features[4].kind == FeatureKind::categorical(20));
  CHECK(d.features[1].levels == std::vector<std::string>{"1", "2"});

  Dataset again = gen_case(SimCase::kNull, 120, 42);
  CHECK(again.features[0].values == d.features[0].values);
  CHECK(again.response == d.response);

  Dataset other = gen_case(SimCase::kNull, 120, 43);
  CHECK(other.response != d.response);
}

TEST_CASE("gen_case rejects tiny samples") {
  CHECK_THROWS_AS(gen_case(SimCase::kNull, 5, 1), DomainError);
}

TEST_CASE("gen_case power conditional probabilities over a million rows") {
  Dataset d = gen_case(SimCase::kPower, 1000000, 7);
  std::int64_t n0 = 0, pos0 = 0, n1 = 0, pos1 = 0;
  for (int i = 0; i < d.n(); ++i) {
    if (d.features[1].codes[i] == 0) {
      ++n0;
      pos0 += d.response[i];
    } else {
      ++n1;
      pos1 += d.response[i];
    }
  }
  const double p_given_1 = static_cast<double>(pos0) / n0;  // X2 == "1"
  const double p_given_2 = static_cast<double>(pos1) / n1;  // X2 == "2"
  CHECK(p_given_1 == doctest::Approx(0.35).epsilon(0.006));
  CHECK(std::abs(p_given_2 - 0.65) < 0.002);
}

TEST_CASE("run_study shape and determinism") {
  SimDesign design;
  design.sim_case = SimCase::kNull;
  design.n = 40;
  design.replications = 3;
  design.forest.ntree = 5;
  design.forest.mtry = 2;
  design.measures = parse_measures("mdi,pg1");

  SimResult a = run_study(design, 99, 1);
  SimResult b = run_study(design, 99, 4);
  CHECK(a.scores == b.scores);
  CHECK(a.feature_names == std::vector<std::string>{"X1", "X2", "X3", "X4", "X5"});
  CHECK(a.measure_names == std::vector<std::string>{"mdi", "pg1"});
  CHECK(a.scores.size() == 3u * 5u * 2u);

  nlohmann::ordered_json config{{"seed", 99}};
  CHECK(sim_long_csv(a, config) == sim_long_csv(b, config));

  SimResult c = run_study(design, 100, 2);
  CHECK(a.scores != c.scores);
}

TEST_CASE("run_study single replication, single tree emits one row per measure") {
  SimDesign design;
  design.sim_case = SimCase::kNull;
  design.n = 30;
  design.replications = 1;
  design.forest.ntree = 1;
  design.forest.mtry = 2;
  design.measures = parse_measures("mdi");
  SimResult r = run_study(design, 5);
  CHECK(r.scores.size() == 5u);
  const std::string csv = sim_long_csv(r, nlohmann::ordered_json::object());
  // header comment + column header + 5 rows
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("expectation_test matches the uninformative-split expectations") {
  SUBCASE("plain OOB Gini is biased by sigma^2 / N") {
    auto r = expectation_test(20, 0.5, 0.5, 100000, 11, NodeMeasure::kGiniOob);
    CHECK(r.theoretical_mean == doctest::Approx(0.0125).epsilon(1e-12));
    CHECK(std::abs(r.empirical_mean - r.theoretical_mean) < 4.0 * r.std_error);
    // the bias is real: zero is far outside the confidence band
    CHECK(r.empirical_mean > 8.0 * r.std_error);
  }
  SUBCASE("bias-corrected OOB Gini is unbiased") {
    auto r = expectation_test(20, 0.3, 0.5, 100000, 12, NodeMeasure::kPg0Hat);
    CHECK(r.theoretical_mean == 0.0);
    CHECK(std::abs(r.empirical_mean) < 4.0 * r.std_error);
  }
  SUBCASE("symmetric penalized Gini is unbiased") {
    auto r = expectation_test(20, 0.3, 0.5, 100000, 13, NodeMeasure::kPg2);
    CHECK(r.theoretical_mean == 0.0);
    CHECK(std::abs(r.empirical_mean) < 4.0 * r.std_error);
  }
}

TEST_CASE("expectation_test counts redraws on small nodes") {
  auto r = expectation_test(5, 0.5, 0.5, 10000, 3, NodeMeasure::kGiniOob);
  CHECK(r.redraws > 0);  // P(empty child) = 2/32 per assignment
  CHECK(r.trials == 10000);
}

TEST_CASE("expectation_test input validation") {
  CHECK_THROWS_AS(expectation_test(3, 0.5, 0.5, 100000, 1, NodeMeasure::kPg2), DomainError);
  CHECK_THROWS_AS(expectation_test(10, 0.5, 0.5, 100, 1, NodeMeasure::kPg2), DomainError);
  CHECK_THROWS_AS(expectation_test(10, 0.5, 1.5, 100000, 1, NodeMeasure::kPg2), DomainError);
}

TEST_CASE("sim summary json carries per-cell statistics") {
  SimDesign design;
  design.sim_case = SimCase::kNull;
  design.n = 30;
  design.replications = 4;
  design.forest.ntree = 3;
  design.forest.mtry = 2;
  design.measures = parse_measures("mdi");
  SimResult r = run_study(design, 1);
  auto j = sim_summary_json(r, nlohmann::ordered_json{{"x", 1}});
  CHECK(j["config"]["x"] == 1);
  REQUIRE(j["summary"].size() == 5);
  for (const auto& cell : j["summary"]) {
    CHECK(cell["replications"] == 4);
    CHECK(cell.contains("median"));
    CHECK(cell.contains("q1"));
    CHECK(cell.contains("stdError"));
  }
}

// The permutation importance has to find X2 in the power design; this mirrors
// the study the penalized measures are benchmarked against.
TEST_CASE("mda identifies X2 in the power case over 100 replications") {
  SimDesign design;
  design.sim_case = SimCase::kPower;
  design.n = 120;
  design.replications = 100;
  design.forest.ntree = 100;
  design.forest.mtry = 3;
  design.measures = parse_measures("mda");
  SimResult r = run_study(design, 2025);
  double means[5];
  for (int j = 0; j < 5; ++j) means[j] = mean_std_error(r.cell(j, 0)).mean;
  for (int j = 0; j < 5; ++j) {
    if (j == 1) continue;
    CHECK(means[1] > means[j]);
  }
}
