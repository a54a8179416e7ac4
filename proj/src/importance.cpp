#include "oobgini/importance.hpp"

#include <algorithm>
#include <sstream>

#include "oobgini/errors.hpp"
#include "oobgini/parallel.hpp"
#include "oobgini/rng.hpp"

namespace oobgini {

std::optional<double> penalized_impurity(double p_oob, double p_in, std::int64_t n_oob,
                                         const PenaltySpec& spec) {
  double oob_scale = 1.0;
  if (spec.bias_corrected) {
    if (n_oob < 2) return std::nullopt;
    oob_scale = static_cast<double>(n_oob) / static_cast<double>(n_oob - 1);
  }
  double value = 0.0;
  if (spec.alpha > 0.0) value += spec.alpha * oob_scale * gini(p_oob);
  if (spec.alpha < 1.0) value += (1.0 - spec.alpha) * gini(p_in);
  if (spec.lambda > 0.0) value += spec.lambda * (p_oob - p_in) * (p_oob - p_in);
  return value;
}

std::optional<double> node_decrease(const NodeStats& parent, const NodeStats& left,
                                    const NodeStats& right, const PenaltySpec& spec) {
  const bool needs_oob = spec.alpha > 0.0 || spec.lambda > 0.0;
  if (needs_oob) {
    const std::int64_t min_oob = spec.bias_corrected ? 2 : 1;
    if (parent.n_oob < min_oob || left.n_oob < min_oob || right.n_oob < min_oob)
      return std::nullopt;
  }
  auto impurity = [&](const NodeStats& s) {
    return *penalized_impurity(needs_oob ? s.p_oob() : 0.0, s.p_in(), s.n_oob, spec);
  };
  const double w_l = static_cast<double>(left.n_in) / static_cast<double>(parent.n_in);
  const double w_r = static_cast<double>(right.n_in) / static_cast<double>(parent.n_in);
  return impurity(parent) - (w_l * impurity(left) + w_r * impurity(right));
}

namespace {

// Shared node walk: per-tree partial sums, reduced in tree order so the
// result does not depend on the thread count.
ImportanceReport node_walk(const Forest& f, const Dataset& d, const PenaltySpec& spec,
                           const std::string& name, bool truncate_negative, int threads) {
  const int p = f.n_features;
  const int ntree = f.params.ntree;
  std::vector<std::vector<double>> tree_scores(ntree, std::vector<double>(p, 0.0));
  std::vector<std::vector<std::int64_t>> tree_used(ntree, std::vector<std::int64_t>(p, 0));
  std::vector<std::vector<std::int64_t>> tree_skipped(ntree, std::vector<std::int64_t>(p, 0));

  parallel_for(static_cast<std::size_t>(ntree), threads, [&](std::size_t t) {
    const Tree& tree = f.trees[t];
    const double n_total = static_cast<double>(tree.nodes[0].stats.n_in);
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) continue;
      const int j = node.rule->feature;
      const auto dec = node_decrease(node.stats, tree.nodes[node.left].stats,
                                     tree.nodes[node.right].stats, spec);
      if (!dec) {
        ++tree_skipped[t][j];
        continue;
      }
      ++tree_used[t][j];
      tree_scores[t][j] += static_cast<double>(node.stats.n_in) / n_total * *dec;
    }
  });

  ImportanceReport report;
  report.measure = name;
  for (const auto& feat : d.features) report.feature_names.push_back(feat.name);
  report.scores.assign(p, 0.0);
  report.diagnostics.assign(p, {});
  for (int t = 0; t < ntree; ++t) {
    for (int j = 0; j < p; ++j) {
      report.scores[j] += tree_scores[t][j];
      report.diagnostics[j].nodes_used += tree_used[t][j];
      report.diagnostics[j].nodes_skipped_zero_oob += tree_skipped[t][j];
    }
  }
  for (int j = 0; j < p; ++j) report.scores[j] /= static_cast<double>(ntree);

  if (truncate_negative) {
    for (auto& s : report.scores) s = std::max(0.0, s);
    report.truncated_at_zero = true;
  }
  return report;
}

}  // namespace

ImportanceReport mdi(const Forest& f, const Dataset& d, int threads) {
  return node_walk(f, d, penalty::inbag, "mdi", false, threads);
}

ImportanceReport pg_importance(const Forest& f, const Dataset& d, const PenaltySpec& spec,
                               const std::string& name, bool truncate_negative, int threads) {
  return node_walk(f, d, spec, name, truncate_negative, threads);
}

ImportanceReport mda(const Forest& f, const Dataset& d, int n_repeats, std::uint64_t seed,
                     int threads) {
  if (n_repeats < 1) throw DomainError("mda needs at least one repeat");
  const int p = f.n_features;
  const int ntree = f.params.ntree;
  std::vector<std::vector<double>> tree_decrease(ntree, std::vector<double>(p, 0.0));
  std::vector<std::int8_t> tree_has_oob(ntree, 0);

  parallel_for(static_cast<std::size_t>(ntree), threads, [&](std::size_t t) {
    const Tree& tree = f.trees[t];
    std::vector<int> oob_rows;
    for (int i = 0; i < f.n_rows; ++i)
      if (f.inbag[t][i] == 0) oob_rows.push_back(i);
    if (oob_rows.empty()) return;
    tree_has_oob[t] = 1;
    const double n_oob = static_cast<double>(oob_rows.size());

    std::int64_t base_correct = 0;
    for (int row : oob_rows)
      base_correct += predict_class(tree, d, row) == d.response[row];

    std::vector<double> cont_values;
    std::vector<std::int32_t> codes;
    for (int j = 0; j < p; ++j) {
      const Feature& feat = d.features[j];
      double acc_drop = 0.0;
      for (int r = 0; r < n_repeats; ++r) {
        auto rng = make_engine(derive_seed(seed, t, static_cast<std::uint64_t>(r),
                                           static_cast<std::uint64_t>(j)));
        std::int64_t perm_correct = 0;
        if (feat.kind.is_categorical()) {
          codes.clear();
          for (int row : oob_rows) codes.push_back(feat.codes[row]);
          shuffle_inplace(codes, rng);
          for (std::size_t i = 0; i < oob_rows.size(); ++i)
            perm_correct += predict_class(tree, d, oob_rows[i], j, 0.0, codes[i]) ==
                            d.response[oob_rows[i]];
        } else {
          cont_values.clear();
          for (int row : oob_rows) cont_values.push_back(feat.values[row]);
          shuffle_inplace(cont_values, rng);
          for (std::size_t i = 0; i < oob_rows.size(); ++i)
            perm_correct += predict_class(tree, d, oob_rows[i], j, cont_values[i], 0) ==
                            d.response[oob_rows[i]];
        }
        acc_drop += static_cast<double>(base_correct - perm_correct) / n_oob;
      }
      tree_decrease[t][j] = acc_drop / static_cast<double>(n_repeats);
    }
  });

  ImportanceReport report;
  report.measure = "mda";
  for (const auto& feat : d.features) report.feature_names.push_back(feat.name);
  report.scores.assign(p, 0.0);
  report.diagnostics.assign(p, {});
  int trees_counted = 0;
  for (int t = 0; t < ntree; ++t) {
    if (!tree_has_oob[t]) continue;
    ++trees_counted;
    for (int j = 0; j < p; ++j) report.scores[j] += tree_decrease[t][j];
  }
  if (trees_counted == 0) throw DomainError("no tree has OOB rows; cannot compute mda");
  for (int j = 0; j < p; ++j) report.scores[j] /= static_cast<double>(trees_counted);

  const auto census = split_census(f);
  for (int j = 0; j < p; ++j) report.diagnostics[j].nodes_used = census[j];
  return report;
}

Measure parse_measure(const std::string& token) {
  if (token == "mdi") return {Measure::Kind::kMdi, {}, "mdi"};
  if (token == "mda") return {Measure::Kind::kMda, {}, "mda"};
  if (token == "pg0") return {Measure::Kind::kPg, penalty::pg0, token};
  if (token == "pg1") return {Measure::Kind::kPg, penalty::pg1, token};
  if (token == "pg2") return {Measure::Kind::kPg, penalty::pg2, token};
  if (token == "pg3") return {Measure::Kind::kPg, penalty::pg3, token};
  if (token == "pg0hat") return {Measure::Kind::kPg, penalty::hat(penalty::pg0), token};
  if (token == "pg1hat") return {Measure::Kind::kPg, penalty::hat(penalty::pg1), token};
  if (token == "pg2hat") return {Measure::Kind::kPg, penalty::hat(penalty::pg2), token};
  throw DomainError("unknown measure '" + token +
                    "' (expected mdi, mda, pg0..pg3 or pg0hat..pg2hat)");
}

std::vector<Measure> parse_measures(const std::string& comma_list) {
  std::vector<Measure> out;
  std::stringstream ss(comma_list);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    out.push_back(parse_measure(token));
  }
  if (out.empty()) throw DomainError("empty measure list");
  return out;
}

ImportanceReport compute_measure(const Measure& m, const Forest& f, const Dataset& d,
                                 const MeasureOptions& opts) {
  switch (m.kind) {
    case Measure::Kind::kMdi:
      return mdi(f, d, opts.threads);
    case Measure::Kind::kMda:
      return mda(f, d, opts.mda_repeats, opts.mda_seed, opts.threads);
    case Measure::Kind::kPg:
    default:
      return pg_importance(f, d, m.spec, m.name, opts.truncate_negative, opts.threads);
  }
}

}  // namespace oobgini
