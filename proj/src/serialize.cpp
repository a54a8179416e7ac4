#include "oobgini/serialize.hpp"

namespace oobgini {

ordered_json tree_to_json(const Tree& tree) {
  ordered_json nodes = ordered_json::array();
  for (const auto& node : tree.nodes) {
    ordered_json jn;
    jn["nIn"] = node.stats.n_in;
    jn["nInPos"] = node.stats.n_in_pos;
    jn["nOob"] = node.stats.n_oob;
    jn["nOobPos"] = node.stats.n_oob_pos;
    if (node.rule) {
      ordered_json jr;
      jr["feature"] = node.rule->feature;
      if (node.rule->observed_mask != 0) {
        jr["type"] = "categorical";
        jr["leftMask"] = node.rule->left_mask;
        jr["observedMask"] = node.rule->observed_mask;
      } else {
        jr["type"] = "continuous";
        jr["threshold"] = node.rule->threshold;
      }
      jn["rule"] = jr;
      jn["left"] = node.left;
      jn["right"] = node.right;
    } else {
      jn["rule"] = nullptr;
    }
    nodes.push_back(std::move(jn));
  }
  ordered_json out;
  out["nodes"] = std::move(nodes);
  out["unseenLevelEvents"] = tree.unseen_level_events;
  return out;
}

ordered_json forest_to_json(const Forest& f) {
  ordered_json out;
  out["format"] = "oobgini.forest/1";
  out["params"] = {{"ntree", f.params.ntree},
                   {"mtry", f.params.mtry},
                   {"minNodeSize", f.params.min_node_size},
                   {"maxDepth", f.params.max_depth}};
  out["seed"] = f.params.seed;
  out["nRows"] = f.n_rows;
  out["nFeatures"] = f.n_features;

  ordered_json inbag = ordered_json::array();
  for (const auto& row : f.inbag) {
    ordered_json rle = ordered_json::array();
    std::size_t i = 0;
    while (i < row.size()) {
      std::size_t j = i;
      while (j < row.size() && row[j] == row[i]) ++j;
      rle.push_back({row[i], j - i});
      i = j;
    }
    inbag.push_back(std::move(rle));
  }
  out["inbag"] = std::move(inbag);

  ordered_json trees = ordered_json::array();
  for (const auto& tree : f.trees) trees.push_back(tree_to_json(tree));
  out["trees"] = std::move(trees);
  return out;
}

}  // namespace oobgini
