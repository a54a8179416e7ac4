#include <doctest.h>

#include <cmath>

#include "oobgini/errors.hpp"
#include "oobgini/rng.hpp"
#include "oobgini/tree.hpp"
#include "oracles.hpp"

using namespace oobgini;
using namespace oobgini::testing;

namespace {

std::vector<int> iota_rows(int n) {
  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = i;
  return rows;
}

std::vector<int> bootstrap_multiplicities(int n, std::mt19937_64& rng) {
  std::vector<int> mult(n, 0);
  for (int i = 0; i < n; ++i) ++mult[uniform_below(rng, static_cast<std::uint64_t>(n))];
  return mult;
}

// Structural checks every grown-and-routed tree must satisfy.
void check_tree_invariants(const Tree& tree) {
  for (const auto& node : tree.nodes) {
    CHECK(node.stats.n_in >= 1);
    CHECK(node.stats.n_in_pos >= 0);
    CHECK(node.stats.n_in_pos <= node.stats.n_in);
    CHECK(node.stats.n_oob_pos <= node.stats.n_oob);
    CHECK(node.is_leaf() == (node.left < 0));
    CHECK(node.is_leaf() == (node.right < 0));
    if (node.is_leaf()) continue;
    const auto& l = tree.nodes[node.left].stats;
    const auto& r = tree.nodes[node.right].stats;
    CHECK(l.n_in + r.n_in == node.stats.n_in);
    CHECK(l.n_in_pos + r.n_in_pos == node.stats.n_in_pos);
    CHECK(l.n_oob + r.n_oob == node.stats.n_oob);
    CHECK(l.n_oob_pos + r.n_oob_pos == node.stats.n_oob_pos);
    // every realized split has positive inbag gain
    CHECK(oracle_gain(l.n_in_pos, l.n_in, r.n_in_pos, r.n_in) > 0.0);
  }
}

}  // namespace

TEST_CASE("gini values") {
  CHECK(gini(0.5) == 0.5);
  CHECK(gini(0.0) == 0.0);
  CHECK(gini(1.0) == 0.0);
  CHECK(gini(0.25) == doctest::Approx(0.375).epsilon(1e-12));
}

TEST_CASE("best_split_continuous perfect separation") {
  const std::vector<double> values{1, 2, 3, 4};
  const std::vector<std::int8_t> labels{0, 0, 1, 1};
  auto s = best_split_continuous(values, labels, iota_rows(4));
  REQUIRE(s.has_value());
  CHECK(s->threshold == 2.5);
  CHECK(s->gain == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("best_split_continuous returns none when unsplittable") {
  const std::vector<double> same{2, 2, 2};
  const std::vector<std::int8_t> mixed{0, 1, 0};
  CHECK_FALSE(best_split_continuous(same, mixed, iota_rows(3)).has_value());

  const std::vector<double> values{1, 2, 3};
  const std::vector<std::int8_t> pure{1, 1, 1};
  CHECK_FALSE(best_split_continuous(values, pure, iota_rows(3)).has_value());
}

TEST_CASE("best_split_continuous tie takes the smallest threshold") {
  // both cut points give gain 1/9; the scan must keep 1.5
  const std::vector<double> values{1, 2, 3};
  const std::vector<std::int8_t> labels{0, 1, 0};
  auto s = best_split_continuous(values, labels, iota_rows(3));
  auto oracle = exhaustive_continuous(values, labels, iota_rows(3));
  REQUIRE(s.has_value());
  REQUIRE(oracle.has_value());
  CHECK(s->threshold == 1.5);
  CHECK(s->threshold == oracle->threshold);
  CHECK(s->gain == doctest::Approx(oracle->gain).epsilon(1e-12));
}

TEST_CASE("best_split_continuous matches exhaustive scan on random instances") {
  auto rng = make_engine(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(uniform_below(rng, 29));
    std::vector<double> values;
    std::vector<std::int8_t> labels;
    for (int i = 0; i < n; ++i) {
      values.push_back(static_cast<double>(uniform_below(rng, 8)));
      labels.push_back(static_cast<std::int8_t>(uniform_below(rng, 2)));
    }
    auto got = best_split_continuous(values, labels, iota_rows(n));
    auto want = exhaustive_continuous(values, labels, iota_rows(n));
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(got->gain == doctest::Approx(want->gain).epsilon(1e-12));
      CHECK(got->threshold == want->threshold);
    }
  }
}

TEST_CASE("best_split_categorical two levels perfectly separated") {
  const std::vector<std::int32_t> codes{0, 0, 1, 1};
  const std::vector<std::int8_t> labels{1, 1, 0, 0};
  auto s = best_split_categorical(codes, 2, labels, iota_rows(4));
  REQUIRE(s.has_value());
  CHECK(s->left_mask == 0b01);  // isolates level 0
  CHECK(s->gain == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("best_split_categorical none when level distributions are equal") {
  const std::vector<std::int32_t> codes{0, 0, 1, 1};
  const std::vector<std::int8_t> labels{0, 1, 0, 1};
  CHECK_FALSE(best_split_categorical(codes, 2, labels, iota_rows(4)).has_value());
}

TEST_CASE("categorical shortcut equals exhaustive subset search") {
  auto rng = make_engine(77);
  int informative = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(uniform_below(rng, 9));  // up to 10 levels
    const int n = 2 + static_cast<int>(uniform_below(rng, 29));
    std::vector<std::int32_t> codes;
    std::vector<std::int8_t> labels;
    for (int i = 0; i < n; ++i) {
      codes.push_back(static_cast<std::int32_t>(uniform_below(rng, k)));
      labels.push_back(static_cast<std::int8_t>(uniform_below(rng, 2)));
    }
    auto got = best_split_categorical(codes, k, labels, iota_rows(n));
    auto want = exhaustive_categorical(codes, k, labels, iota_rows(n));
    REQUIRE(got.has_value() == want.has_value());
    if (!got) continue;
    ++informative;
    CHECK(got->gain == doctest::Approx(want->gain).epsilon(1e-12));
    // the returned partition must achieve the exhaustive optimum
    std::int64_t n_l = 0, pos_l = 0, n_r = 0, pos_r = 0;
    for (int i = 0; i < n; ++i) {
      if ((got->left_mask >> codes[i]) & 1) {
        ++n_l;
        pos_l += labels[i];
      } else {
        ++n_r;
        pos_r += labels[i];
      }
    }
    CHECK(oracle_gain(pos_l, n_l, pos_r, n_r) == doctest::Approx(want->gain).epsilon(1e-12));
  }
  CHECK(informative > 100);  // the generator must actually exercise the search
}

TEST_CASE("grow handles pure and separable data") {
  SUBCASE("pure response gives a single leaf") {
    Dataset d = make_dataset({cont_feature("x", {1, 2, 3, 4})}, {1, 1, 1, 1});
    Tree t = grow(d, std::vector<int>{1, 1, 1, 1}, {1, 1, -1, 0});
    CHECK(t.nodes.size() == 1);
    CHECK(t.nodes[0].is_leaf());
  }
  SUBCASE("separable rows give a depth-1 tree with the perfect split") {
    Dataset d = make_dataset({cont_feature("x", {1, 2, 3, 4})}, {0, 0, 1, 1});
    Tree t = grow(d, std::vector<int>{1, 1, 1, 1}, {1, 1, -1, 0});
    REQUIRE(t.nodes.size() == 3);
    REQUIRE(t.nodes[0].rule.has_value());
    CHECK(t.nodes[0].rule->threshold == 2.5);
    CHECK(t.nodes[t.nodes[0].left].is_leaf());
    CHECK(t.nodes[t.nodes[0].right].is_leaf());
  }
}

TEST_CASE("grow is deterministic and respects multiplicities") {
  Dataset d = make_dataset(
      {cont_feature("a", {1, 5, 2, 8, 3, 9, 4, 7}),
       cat_feature("b", 3, {0, 1, 2, 0, 1, 2, 0, 1})},
      {0, 1, 0, 1, 1, 0, 0, 1});
  const std::vector<int> mult{2, 1, 0, 1, 1, 2, 1, 0};

  GrowParams p{2, 1, -1, 123};
  Tree t1 = grow(d, mult, p);
  Tree t2 = grow(d, mult, p);
  CHECK(t1 == t2);

  CHECK(t1.nodes[0].stats.n_in == 8);  // multiplicities counted
  check_tree_invariants(t1);

  // with mtry below the feature count the drawn subset depends on the seed
  GrowParams p1{1, 1, -1, 50};
  Tree narrow = grow(d, mult, p1);
  int differing = 0;
  for (std::uint64_t s = 51; s < 61; ++s) {
    p1.seed = s;
    if (!(grow(d, mult, p1) == narrow)) ++differing;
  }
  CHECK(differing > 0);
}

TEST_CASE("grow stops at max_depth and min_node_size") {
  Dataset d = make_dataset({cont_feature("x", {1, 2, 3, 4, 5, 6, 7, 8})},
                           {0, 1, 0, 1, 0, 1, 0, 1});
  const std::vector<int> ones(8, 1);
  Tree stump = grow(d, ones, {1, 1, 0, 9});
  CHECK(stump.nodes.size() == 1);

  Tree depth1 = grow(d, ones, {1, 1, 1, 9});
  for (std::size_t i = 1; i < depth1.nodes.size(); ++i) CHECK(depth1.nodes[i].is_leaf());

  Tree big_min = grow(d, ones, {1, 9, -1, 9});
  CHECK(big_min.nodes.size() == 1);
}

TEST_CASE("route_oob counts match a naive per-row replay") {
  auto rng = make_engine(5150);
  std::vector<double> xs;
  std::vector<std::int32_t> cs;
  std::vector<std::int8_t> ys;
  for (int i = 0; i < 40; ++i) {
    xs.push_back(static_cast<double>(uniform_below(rng, 10)));
    cs.push_back(static_cast<std::int32_t>(uniform_below(rng, 4)));
    ys.push_back(static_cast<std::int8_t>(uniform_below(rng, 2)));
  }
  Dataset d = make_dataset({cont_feature("x", xs), cat_feature("c", 4, cs)}, ys);

  std::vector<int> mult(40, 0);
  for (int i = 0; i < 20; ++i) mult[i] = 2;  // rows 20..39 are OOB
  std::vector<int> oob;
  for (int i = 20; i < 40; ++i) oob.push_back(i);

  Tree t = grow(d, mult, {2, 1, -1, 31});
  route_oob(t, d, oob);
  check_tree_invariants(t);
  CHECK(t.nodes[0].stats.n_oob == 20);

  // independent replay: walk each row by evaluating rules directly
  std::vector<std::int64_t> n_oob(t.nodes.size(), 0), n_pos(t.nodes.size(), 0);
  for (int row : oob) {
    int id = 0;
    for (;;) {
      n_oob[id] += 1;
      n_pos[id] += d.response[row];
      const auto& node = t.nodes[id];
      if (node.is_leaf()) break;
      const auto& rule = *node.rule;
      bool left;
      if (d.features[rule.feature].kind.is_categorical()) {
        const auto code = d.features[rule.feature].codes[row];
        left = ((rule.observed_mask >> code) & 1) != 0 && ((rule.left_mask >> code) & 1) != 0;
      } else {
        left = d.features[rule.feature].values[row] <= rule.threshold;
      }
      id = left ? node.left : node.right;
    }
  }
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    CHECK(t.nodes[i].stats.n_oob == n_oob[i]);
    CHECK(t.nodes[i].stats.n_oob_pos == n_pos[i]);
  }
}

TEST_CASE("route_oob with empty and singleton OOB sets") {
  Dataset d = make_dataset({cont_feature("x", {1, 2, 3, 4})}, {0, 0, 1, 1});
  Tree t = grow(d, std::vector<int>{1, 1, 1, 1}, {1, 1, -1, 0});

  route_oob(t, d, std::vector<int>{});
  for (const auto& node : t.nodes) CHECK(node.stats.n_oob == 0);

  route_oob(t, d, std::vector<int>{3});
  int touched = 0;
  for (const auto& node : t.nodes) touched += node.stats.n_oob == 1;
  CHECK(touched == 2);  // one node per depth level on the path
}

TEST_CASE("unseen categorical level routes right and is counted") {
  // level 2 never appears inbag, so the root split cannot observe it
  Dataset d = make_dataset({cat_feature("c", 3, {0, 0, 1, 1, 2, 2})}, {1, 1, 0, 0, 0, 1});
  std::vector<int> mult{1, 1, 1, 1, 0, 0};
  Tree t = grow(d, mult, {1, 1, -1, 0});
  REQUIRE(t.nodes.size() == 3);
  REQUIRE((t.nodes[0].rule->observed_mask & 0b100) == 0);

  route_oob(t, d, std::vector<int>{4, 5});
  CHECK(t.unseen_level_events == 2);
  CHECK(t.nodes[t.nodes[0].right].stats.n_oob == 2);
  CHECK(t.nodes[t.nodes[0].left].stats.n_oob == 0);
}

TEST_CASE("grown and routed trees satisfy the structural invariants, any dataset") {
  auto rng = make_engine(90210);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 10 + static_cast<int>(uniform_below(rng, 60));
    const int levels = 2 + static_cast<int>(uniform_below(rng, 11));
    std::vector<double> xs;
    std::vector<std::int32_t> cs;
    std::vector<std::int8_t> ys;
    bool has0 = false, has1 = false;
    for (int i = 0; i < n; ++i) {
      xs.push_back(static_cast<double>(uniform_below(rng, 12)));
      cs.push_back(static_cast<std::int32_t>(uniform_below(rng, levels)));
      const auto y = static_cast<std::int8_t>(uniform_below(rng, 2));
      (y ? has1 : has0) = true;
      ys.push_back(y);
    }
    if (!has0 || !has1) continue;
    Dataset d = make_dataset({cont_feature("x", xs), cat_feature("c", levels, cs)}, ys);

    std::vector<int> mult = bootstrap_multiplicities(n, rng);
    std::vector<int> oob;
    for (int i = 0; i < n; ++i)
      if (mult[i] == 0) oob.push_back(i);

    GrowParams params{1 + static_cast<int>(uniform_below(rng, 2)), 1,
                      static_cast<int>(uniform_below(rng, 2)) ? -1 : 4,
                      derive_seed(90210, trial)};
    Tree t = grow(d, mult, params);
    Tree again = grow(d, mult, params);
    CHECK(t == again);

    route_oob(t, d, oob);
    check_tree_invariants(t);
    CHECK(t.nodes[0].stats.n_oob == static_cast<std::int64_t>(oob.size()));
    CHECK(t.nodes[0].stats.n_in == n);
  }
}

TEST_CASE("grow input validation") {
  Dataset d = make_dataset({cont_feature("x", {1, 2})}, {0, 1});
  CHECK_THROWS_AS(grow(d, std::vector<int>{0, 0}, {1, 1, -1, 0}), DomainError);
  CHECK_THROWS_AS(grow(d, std::vector<int>{1}, {1, 1, -1, 0}), DomainError);
  CHECK_THROWS_AS(grow(d, std::vector<int>{1, -1}, {1, 1, -1, 0}), DomainError);
}
