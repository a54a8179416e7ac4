#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "oobgini/dataset.hpp"
#include "oobgini/tree.hpp"

namespace oobgini {

struct ForestParams {
  int ntree = 100;
  int mtry = 0;  // 0 = floor(sqrt(#features))
  std::int64_t min_node_size = 1;
  int max_depth = -1;  // -1 = unlimited
  std::uint64_t seed = 0;

  bool operator==(const ForestParams&) const = default;
};

// Immutable after fit. Row i is OOB for tree t iff inbag[t][i] == 0.
struct Forest {
  ForestParams params;  // with mtry resolved
  int n_rows = 0;
  int n_features = 0;
  std::vector<std::vector<int>> inbag;  // ntree x n multiplicities, each summing to n
  std::vector<Tree> trees;
};

// n uniform draws with replacement, returned as per-row counts.
std::vector<int> bootstrap_counts(int n, std::uint64_t seed);

// Grows ntree trees on independent bootstrap samples and routes each tree's
// OOB rows. Per-tree seeds are derived from params.seed, so the result is
// bitwise identical for any thread count. threads = 0 defers to the
// OOBGINI_THREADS environment variable.
Forest fit(const Dataset& d, const ForestParams& params, int threads = 0);

// Majority-vote probability of class 1 over the trees for which each row is
// OOB; nullopt (abstain) when no tree leaves the row out.
std::vector<std::optional<double>> oob_predict(const Forest& f, const Dataset& d,
                                               int threads = 0);

// Misclassification rate of thresholded OOB votes over non-abstaining rows.
double oob_error(const Forest& f, const Dataset& d, int threads = 0);

// Number of internal nodes splitting on each feature, across all trees.
std::vector<std::int64_t> split_census(const Forest& f);

}  // namespace oobgini
