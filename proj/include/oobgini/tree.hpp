#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oobgini/dataset.hpp"

namespace oobgini {

// Binary Gini impurity, 2p(1-p), in [0, 0.5].
inline double gini(double p) { return 2.0 * p * (1.0 - p); }

// Gains below this are treated as zero (no split).
constexpr double kMinGain = 1e-12;

// Per-node sample counts. Inbag counts include bootstrap multiplicity; OOB
// counts are filled by route_oob and stay zero until then.
struct NodeStats {
  std::int64_t n_in = 0;
  std::int64_t n_in_pos = 0;
  std::int64_t n_oob = 0;
  std::int64_t n_oob_pos = 0;

  double p_in() const { return static_cast<double>(n_in_pos) / static_cast<double>(n_in); }
  double p_oob() const { return static_cast<double>(n_oob_pos) / static_cast<double>(n_oob); }
  bool operator==(const NodeStats&) const = default;
};

// Continuous: go left iff value <= threshold. Categorical: go left iff the
// level's bit is set in left_mask; left_mask is a proper nonempty subset of
// observed_mask (the levels seen at the node during growth), normalized to
// the numerically smaller of the two complementary representations. Levels
// outside observed_mask route right.
struct SplitRule {
  int feature = -1;
  double threshold = 0.0;
  std::uint64_t left_mask = 0;
  std::uint64_t observed_mask = 0;
  bool operator==(const SplitRule&) const = default;
};

struct TreeNode {
  NodeStats stats;
  std::optional<SplitRule> rule;
  int left = -1;
  int right = -1;

  bool is_leaf() const { return !rule.has_value(); }
  bool operator==(const TreeNode&) const = default;
};

struct Tree {
  std::vector<TreeNode> nodes;  // preorder, root at 0
  std::int64_t unseen_level_events = 0;

  bool operator==(const Tree&) const = default;
};

struct GrowParams {
  int mtry = 0;
  std::int64_t min_node_size = 1;
  int max_depth = -1;  // -1 = unlimited
  std::uint64_t seed = 0;
};

struct ContinuousSplit {
  double threshold = 0.0;
  double gain = 0.0;
};

struct CategoricalSplit {
  std::uint64_t left_mask = 0;
  double gain = 0.0;
};

// Best threshold by inbag Gini gain over the candidate rows (midpoints
// between consecutive distinct values; ties take the smallest threshold).
// Returns nullopt when all values are identical or no gain is positive.
std::optional<ContinuousSplit> best_split_continuous(std::span<const double> values,
                                                     std::span<const std::int8_t> labels,
                                                     std::span<const int> candidate_rows);

// Gini-optimal binary level partition via the CART ordering shortcut: levels
// sorted by node-local positive proportion, k-1 ordered cuts scanned. Exact
// for binary-response Gini. Ties resolve toward the smaller normalized mask.
std::optional<CategoricalSplit> best_split_categorical(std::span<const std::int32_t> codes,
                                                       int level_count,
                                                       std::span<const std::int8_t> labels,
                                                       std::span<const int> candidate_rows);

// Grows a CART tree on the bootstrap sample described by per-row inbag
// multiplicities. At each node, mtry features are drawn without replacement;
// recursion stops on purity, min_node_size, max_depth or no positive gain.
Tree grow(const Dataset& d, std::span<const int> inbag_multiplicities, const GrowParams& params);

// Routes each OOB row from the root to a leaf, incrementing n_oob/n_oob_pos
// at every node visited. Unseen categorical levels follow the right branch
// and bump tree.unseen_level_events.
void route_oob(Tree& tree, const Dataset& d, std::span<const int> oob_rows);

// Leaf reached by a row; feature_override >= 0 substitutes that feature's
// value (cont_override or code_override) during routing, for permutation
// importance.
int route_to_leaf(const Tree& tree, const Dataset& d, int row, int feature_override = -1,
                  double cont_override = 0.0, std::int32_t code_override = 0);

// Majority inbag class of the row's leaf (ties vote 1).
int predict_class(const Tree& tree, const Dataset& d, int row, int feature_override = -1,
                  double cont_override = 0.0, std::int32_t code_override = 0);

}  // namespace oobgini
