#include "oobgini/forest.hpp"

#include <cmath>

#include "oobgini/errors.hpp"
#include "oobgini/parallel.hpp"
#include "oobgini/rng.hpp"

namespace oobgini {

namespace {

constexpr std::uint64_t kBootstrapStream = 0;
constexpr std::uint64_t kGrowStream = 1;

}  // namespace

std::vector<int> bootstrap_counts(int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("bootstrap needs at least one row");
  std::vector<int> counts(n, 0);
  auto rng = make_engine(seed);
  for (int i = 0; i < n; ++i)
    ++counts[uniform_below(rng, static_cast<std::uint64_t>(n))];
  return counts;
}

Forest fit(const Dataset& d, const ForestParams& params, int threads) {
  const int n = d.n();
  const int p = d.n_features();
  if (n < 2) throw DomainError("need at least 2 rows to fit");
  if (p < 1) throw DomainError("dataset has no features");
  if (params.ntree < 1) throw DomainError("ntree must be positive");

  bool has0 = false, has1 = false;
  for (auto y : d.response) (y ? has1 : has0) = true;
  if (!has0 || !has1) throw DomainError("response has a single class; need both 0 and 1");

  ForestParams resolved = params;
  if (resolved.mtry == 0)
    resolved.mtry = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(p))));
  if (resolved.mtry < 1 || resolved.mtry > p)
    throw DomainError("mtry must be between 1 and the number of features");
  if (resolved.min_node_size < 1) resolved.min_node_size = 1;

  Forest forest;
  forest.params = resolved;
  forest.n_rows = n;
  forest.n_features = p;
  forest.inbag.resize(resolved.ntree);
  forest.trees.resize(resolved.ntree);

  parallel_for(static_cast<std::size_t>(resolved.ntree), threads, [&](std::size_t t) {
    const std::uint64_t tree_seed = derive_seed(resolved.seed, t);
    std::vector<int> counts = bootstrap_counts(n, derive_seed(tree_seed, kBootstrapStream));

    GrowParams gp;
    gp.mtry = resolved.mtry;
    gp.min_node_size = resolved.min_node_size;
    gp.max_depth = resolved.max_depth;
    gp.seed = derive_seed(tree_seed, kGrowStream);
    Tree tree = grow(d, counts, gp);

    std::vector<int> oob_rows;
    for (int i = 0; i < n; ++i)
      if (counts[i] == 0) oob_rows.push_back(i);
    route_oob(tree, d, oob_rows);

    forest.inbag[t] = std::move(counts);
    forest.trees[t] = std::move(tree);
  });

  return forest;
}

std::vector<std::optional<double>> oob_predict(const Forest& f, const Dataset& d, int threads) {
  if (f.n_rows != d.n()) throw DomainError("forest was fitted on a different row count");
  std::vector<std::optional<double>> out(d.n());
  parallel_for(static_cast<std::size_t>(d.n()), threads, [&](std::size_t row) {
    int votes = 0, total = 0;
    for (int t = 0; t < f.params.ntree; ++t) {
      if (f.inbag[t][row] != 0) continue;
      votes += predict_class(f.trees[t], d, static_cast<int>(row));
      ++total;
    }
    if (total > 0)
      out[row] = static_cast<double>(votes) / static_cast<double>(total);
  });
  return out;
}

double oob_error(const Forest& f, const Dataset& d, int threads) {
  auto probs = oob_predict(f, d, threads);
  std::int64_t wrong = 0, total = 0;
  for (int i = 0; i < d.n(); ++i) {
    if (!probs[i]) continue;
    const int pred = *probs[i] >= 0.5 ? 1 : 0;
    wrong += pred != d.response[i];
    ++total;
  }
  if (total == 0) throw DomainError("no OOB predictions available");
  return static_cast<double>(wrong) / static_cast<double>(total);
}

std::vector<std::int64_t> split_census(const Forest& f) {
  std::vector<std::int64_t> census(f.n_features, 0);
  for (const auto& tree : f.trees)
    for (const auto& node : tree.nodes)
      if (!node.is_leaf()) ++census[node.rule->feature];
  return census;
}

}  // namespace oobgini
