#pragma once

#include <json.hpp>

#include "oobgini/forest.hpp"
#include "oobgini/tree.hpp"

namespace oobgini {

using ordered_json = nlohmann::ordered_json;

// Audit/debug form of a tree: preorder node array with per-node inbag/OOB
// stats, the split rule (null for leaves) and child indices.
ordered_json tree_to_json(const Tree& tree);

// Forest envelope: {format, params, nRows, nFeatures, inbag (run-length
// encoded as [value, runLength] pairs per tree), trees[]}.
ordered_json forest_to_json(const Forest& f);

}  // namespace oobgini
