#include "oobgini/tree.hpp"

#include <algorithm>
#include <cmath>

#include "oobgini/errors.hpp"
#include "oobgini/rng.hpp"

namespace oobgini {

namespace {

// Weighted child impurity, up to the monotone transform 2/n: minimizing
// posL*negL/nL + posR*negR/nR maximizes the Gini gain.
double split_score(std::int64_t pos_l, std::int64_t n_l, std::int64_t pos_r, std::int64_t n_r) {
  const double neg_l = static_cast<double>(n_l - pos_l);
  const double neg_r = static_cast<double>(n_r - pos_r);
  return static_cast<double>(pos_l) * neg_l / static_cast<double>(n_l) +
         static_cast<double>(pos_r) * neg_r / static_cast<double>(n_r);
}

double gain_from_score(std::int64_t pos, std::int64_t n, double score) {
  const double parent = static_cast<double>(pos) * static_cast<double>(n - pos) /
                        static_cast<double>(n);
  return 2.0 * (parent - score) / static_cast<double>(n);
}

std::uint64_t normalize_mask(std::uint64_t mask, std::uint64_t observed) {
  const std::uint64_t flipped = observed & ~mask;
  return std::min(mask, flipped);
}

}  // namespace

std::optional<ContinuousSplit> best_split_continuous(std::span<const double> values,
                                                     std::span<const std::int8_t> labels,
                                                     std::span<const int> candidate_rows) {
  const std::size_t n = candidate_rows.size();
  if (n < 2) return std::nullopt;

  std::vector<std::pair<double, std::int8_t>> sorted;
  sorted.reserve(n);
  std::int64_t pos = 0;
  for (int row : candidate_rows) {
    sorted.emplace_back(values[row], labels[row]);
    pos += labels[row];
  }
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front().first == sorted.back().first) return std::nullopt;

  double best_score = 0.0;
  double best_threshold = 0.0;
  bool found = false;
  std::int64_t pos_l = 0;
  for (std::size_t i = 1; i < n; ++i) {
    pos_l += sorted[i - 1].second;
    if (sorted[i - 1].first == sorted[i].first) continue;
    const std::int64_t n_l = static_cast<std::int64_t>(i);
    const std::int64_t n_r = static_cast<std::int64_t>(n) - n_l;
    const double score = split_score(pos_l, n_l, pos - pos_l, n_r);
    if (!found || score < best_score) {
      found = true;
      best_score = score;
      const double lo = sorted[i - 1].first;
      const double hi = sorted[i].first;
      double mid = lo + (hi - lo) / 2.0;
      if (mid >= hi) mid = lo;  // adjacent doubles: keep the cut separating
      best_threshold = mid;
    }
  }
  if (!found) return std::nullopt;

  const double gain = gain_from_score(pos, static_cast<std::int64_t>(n), best_score);
  if (gain <= kMinGain) return std::nullopt;
  return ContinuousSplit{best_threshold, gain};
}

std::optional<CategoricalSplit> best_split_categorical(std::span<const std::int32_t> codes,
                                                       int level_count,
                                                       std::span<const std::int8_t> labels,
                                                       std::span<const int> candidate_rows) {
  const std::size_t n = candidate_rows.size();
  if (n < 2) return std::nullopt;

  std::vector<std::int64_t> count(level_count, 0), pos_count(level_count, 0);
  std::int64_t pos = 0;
  for (int row : candidate_rows) {
    const std::int32_t c = codes[row];
    ++count[c];
    pos_count[c] += labels[row];
    pos += labels[row];
  }

  std::uint64_t observed = 0;
  std::vector<int> levels;
  for (int lv = 0; lv < level_count; ++lv) {
    if (count[lv] > 0) {
      observed |= std::uint64_t{1} << lv;
      levels.push_back(lv);
    }
  }
  if (levels.size() < 2) return std::nullopt;

  // CART shortcut: order levels by positive proportion, scan ordered cuts.
  std::sort(levels.begin(), levels.end(), [&](int a, int b) {
    const double pa = static_cast<double>(pos_count[a]) / static_cast<double>(count[a]);
    const double pb = static_cast<double>(pos_count[b]) / static_cast<double>(count[b]);
    if (pa != pb) return pa < pb;
    return a < b;
  });

  bool found = false;
  double best_score = 0.0;
  std::uint64_t best_mask = 0;
  std::int64_t n_l = 0, pos_l = 0;
  std::uint64_t prefix = 0;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    const int lv = levels[i];
    n_l += count[lv];
    pos_l += pos_count[lv];
    prefix |= std::uint64_t{1} << lv;
    const double score =
        split_score(pos_l, n_l, pos - pos_l, static_cast<std::int64_t>(n) - n_l);
    const std::uint64_t mask = normalize_mask(prefix, observed);
    if (!found || score < best_score || (score == best_score && mask < best_mask)) {
      found = true;
      best_score = score;
      best_mask = mask;
    }
  }

  const double gain = gain_from_score(pos, static_cast<std::int64_t>(n), best_score);
  if (gain <= kMinGain) return std::nullopt;
  return CategoricalSplit{best_mask, gain};
}

namespace {

struct Grower {
  const Dataset& d;
  Tree& tree;
  int mtry;
  std::int64_t min_node_size;
  int max_depth;
  std::mt19937_64 rng;
  std::vector<int> feature_pool;

  int build(std::vector<int>& rows, int depth) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    NodeStats stats;
    stats.n_in = static_cast<std::int64_t>(rows.size());
    for (int row : rows) stats.n_in_pos += d.response[row];
    tree.nodes[node_id].stats = stats;

    const bool pure = stats.n_in_pos == 0 || stats.n_in_pos == stats.n_in;
    if (pure || stats.n_in < min_node_size || (max_depth >= 0 && depth >= max_depth))
      return node_id;

    // Draw mtry candidate features without replacement.
    const int p = d.n_features();
    for (int i = 0; i < mtry; ++i) {
      const int j = i + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(p - i)));
      std::swap(feature_pool[i], feature_pool[j]);
    }
    std::vector<int> drawn(feature_pool.begin(), feature_pool.begin() + mtry);
    std::sort(drawn.begin(), drawn.end());

    double best_gain = 0.0;
    SplitRule best_rule;
    bool found = false;
    const std::span<const std::int8_t> labels(d.response);
    for (int j : drawn) {
      const Feature& f = d.features[j];
      if (f.kind.is_categorical()) {
        auto s = best_split_categorical(f.codes, f.kind.level_count, labels, rows);
        if (s && (!found || s->gain > best_gain)) {
          found = true;
          best_gain = s->gain;
          best_rule = SplitRule{j, 0.0, s->left_mask, 0};
        }
      } else {
        auto s = best_split_continuous(f.values, labels, rows);
        if (s && (!found || s->gain > best_gain)) {
          found = true;
          best_gain = s->gain;
          best_rule = SplitRule{j, s->threshold, 0, 0};
        }
      }
    }
    if (!found) return node_id;

    if (d.features[best_rule.feature].kind.is_categorical()) {
      std::uint64_t observed = 0;
      for (int row : rows) observed |= std::uint64_t{1} << d.features[best_rule.feature].codes[row];
      best_rule.observed_mask = observed;
    }

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    const Feature& f = d.features[best_rule.feature];
    for (int row : rows) {
      bool go_left = f.kind.is_categorical()
                         ? ((best_rule.left_mask >> f.codes[row]) & 1) != 0
                         : f.values[row] <= best_rule.threshold;
      (go_left ? left_rows : right_rows).push_back(row);
    }
    rows.clear();
    rows.shrink_to_fit();

    tree.nodes[node_id].rule = best_rule;
    const int left_id = build(left_rows, depth + 1);
    tree.nodes[node_id].left = left_id;
    const int right_id = build(right_rows, depth + 1);
    tree.nodes[node_id].right = right_id;
    return node_id;
  }
};

}  // namespace

Tree grow(const Dataset& d, std::span<const int> inbag_multiplicities, const GrowParams& params) {
  const int n = d.n();
  const int p = d.n_features();
  if (static_cast<int>(inbag_multiplicities.size()) != n)
    throw DomainError("inbag multiplicities length does not match dataset rows");
  if (p == 0) throw DomainError("dataset has no features");

  std::vector<int> rows;
  for (int i = 0; i < n; ++i) {
    if (inbag_multiplicities[i] < 0) throw DomainError("negative inbag multiplicity");
    for (int k = 0; k < inbag_multiplicities[i]; ++k) rows.push_back(i);
  }
  if (rows.empty()) throw DomainError("all inbag multiplicities are zero");

  int mtry = params.mtry;
  if (mtry <= 0) mtry = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(p))));
  mtry = std::min(mtry, p);

  Tree tree;
  Grower grower{d, tree, mtry, std::max<std::int64_t>(1, params.min_node_size), params.max_depth,
                make_engine(params.seed), {}};
  grower.feature_pool.resize(p);
  for (int j = 0; j < p; ++j) grower.feature_pool[j] = j;
  grower.build(rows, 0);
  return tree;
}

namespace {

// Branch decision shared by OOB routing and prediction.
inline bool goes_left(const SplitRule& rule, const Feature& f, double cont_value,
                      std::int32_t code, bool* unseen) {
  if (!f.kind.is_categorical()) return cont_value <= rule.threshold;
  if (((rule.observed_mask >> code) & 1) == 0) {
    if (unseen) *unseen = true;
    return false;  // unseen level: right branch
  }
  return ((rule.left_mask >> code) & 1) != 0;
}

}  // namespace

void route_oob(Tree& tree, const Dataset& d, std::span<const int> oob_rows) {
  for (int row : oob_rows) {
    const std::int8_t y = d.response[row];
    int node_id = 0;
    for (;;) {
      TreeNode& node = tree.nodes[node_id];
      node.stats.n_oob += 1;
      node.stats.n_oob_pos += y;
      if (node.is_leaf()) break;
      const SplitRule& rule = *node.rule;
      const Feature& f = d.features[rule.feature];
      bool unseen = false;
      const bool left = goes_left(rule, f,
                                  f.kind.is_categorical() ? 0.0 : f.values[row],
                                  f.kind.is_categorical() ? f.codes[row] : 0, &unseen);
      if (unseen) ++tree.unseen_level_events;
      node_id = left ? node.left : node.right;
    }
  }
}

int route_to_leaf(const Tree& tree, const Dataset& d, int row, int feature_override,
                  double cont_override, std::int32_t code_override) {
  int node_id = 0;
  for (;;) {
    const TreeNode& node = tree.nodes[node_id];
    if (node.is_leaf()) return node_id;
    const SplitRule& rule = *node.rule;
    const Feature& f = d.features[rule.feature];
    double cont_value = 0.0;
    std::int32_t code = 0;
    if (f.kind.is_categorical())
      code = rule.feature == feature_override ? code_override : f.codes[row];
    else
      cont_value = rule.feature == feature_override ? cont_override : f.values[row];
    node_id = goes_left(rule, f, cont_value, code, nullptr) ? node.left : node.right;
  }
}

int predict_class(const Tree& tree, const Dataset& d, int row, int feature_override,
                  double cont_override, std::int32_t code_override) {
  const int leaf = route_to_leaf(tree, d, row, feature_override, cont_override, code_override);
  const NodeStats& s = tree.nodes[leaf].stats;
  return 2 * s.n_in_pos >= s.n_in ? 1 : 0;
}

}  // namespace oobgini
