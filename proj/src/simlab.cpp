#include "oobgini/simlab.hpp"

#include <cmath>

#include "oobgini/csv.hpp"
#include "oobgini/errors.hpp"
#include "oobgini/numfmt.hpp"
#include "oobgini/parallel.hpp"
#include "oobgini/rng.hpp"

namespace oobgini {

SimCase parse_sim_case(const std::string& token) {
  if (token == "null") return SimCase::kNull;
  if (token == "power") return SimCase::kPower;
  throw DomainError("unknown case '" + token + "' (expected null or power)");
}

Dataset gen_case(SimCase sim_case, int n, std::uint64_t seed) {
  if (n < 10) throw DomainError("simulation needs n >= 10");
  auto rng = make_engine(seed);

  Dataset d;
  {
    Feature x1;
    x1.name = "X1";
    x1.kind = FeatureKind::continuous();
    x1.values.reserve(n);
    for (int i = 0; i < n; ++i) x1.values.push_back(standard_normal(rng));
    d.features.push_back(std::move(x1));
  }
  const int level_counts[] = {2, 4, 10, 20};
  for (int k = 0; k < 4; ++k) {
    Feature x;
    x.name = "X" + std::to_string(k + 2);
    x.kind = FeatureKind::categorical(level_counts[k]);
    for (int lv = 1; lv <= level_counts[k]; ++lv) x.levels.push_back(std::to_string(lv));
    x.codes.reserve(n);
    for (int i = 0; i < n; ++i)
      x.codes.push_back(static_cast<std::int32_t>(
          uniform_below(rng, static_cast<std::uint64_t>(level_counts[k]))));
    d.features.push_back(std::move(x));
  }

  d.response.reserve(n);
  const auto& x2 = d.features[1].codes;
  for (int i = 0; i < n; ++i) {
    double p = 0.5;
    if (sim_case == SimCase::kPower) p = x2[i] == 0 ? 0.35 : 0.65;
    d.response.push_back(bernoulli(rng, p) ? 1 : 0);
  }

  d.validate();
  return d;
}

std::vector<double> SimResult::cell(int feature, int measure) const {
  std::vector<double> out;
  out.reserve(replications);
  for (int r = 0; r < replications; ++r) out.push_back(score(r, feature, measure));
  return out;
}

SimResult run_study(const SimDesign& design, std::uint64_t master_seed, int threads) {
  if (design.replications < 1) throw DomainError("replications must be positive");
  if (design.measures.empty()) throw DomainError("no measures requested");

  SimResult result;
  result.replications = design.replications;
  for (const auto& m : design.measures) result.measure_names.push_back(m.name);

  const int nm = static_cast<int>(design.measures.size());
  const int nf = 5;
  for (int j = 0; j < nf; ++j) result.feature_names.push_back("X" + std::to_string(j + 1));
  result.scores.assign(static_cast<std::size_t>(design.replications) * nf * nm, 0.0);

  // Replications run in parallel; everything inside one replication stays
  // sequential (unless there is just one) so only the per-replication
  // derived seeds matter.
  const int inner_threads = design.replications == 1 ? threads : 1;
  parallel_for(static_cast<std::size_t>(design.replications), threads, [&](std::size_t r) {
    const Dataset d = gen_case(design.sim_case, design.n, derive_seed(master_seed, r, 0));
    ForestParams params = design.forest;
    params.seed = derive_seed(master_seed, r, 1);
    const Forest forest = fit(d, params, inner_threads);

    MeasureOptions opts;
    opts.mda_repeats = design.mda_repeats;
    opts.mda_seed = derive_seed(master_seed, r, 2);
    opts.threads = inner_threads;
    for (int m = 0; m < nm; ++m) {
      const ImportanceReport report = compute_measure(design.measures[m], forest, d, opts);
      for (int j = 0; j < nf; ++j)
        result.scores[(r * nf + j) * nm + m] = report.scores[j];
    }
  });

  return result;
}

std::string sim_long_csv(const SimResult& result, const nlohmann::ordered_json& config) {
  std::string out;
  out += "# oobgini simulate " + config.dump() + "\n";
  out += "replication,feature,measure,score\n";
  const int nf = static_cast<int>(result.feature_names.size());
  const int nm = static_cast<int>(result.measure_names.size());
  for (int r = 0; r < result.replications; ++r)
    for (int j = 0; j < nf; ++j)
      for (int m = 0; m < nm; ++m)
        out += std::to_string(r) + "," + csv_quote(result.feature_names[j]) + "," +
               csv_quote(result.measure_names[m]) + "," +
               to_string_shortest(result.score(r, j, m)) + "\n";
  return out;
}

nlohmann::ordered_json sim_summary_json(const SimResult& result,
                                        const nlohmann::ordered_json& config) {
  nlohmann::ordered_json out;
  out["config"] = config;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < result.measure_names.size(); ++m) {
    for (std::size_t j = 0; j < result.feature_names.size(); ++j) {
      auto values = result.cell(static_cast<int>(j), static_cast<int>(m));
      const auto ms = mean_std_error(values);
      const auto box = box_stats(values);
      cells.push_back({{"measure", result.measure_names[m]},
                       {"feature", result.feature_names[j]},
                       {"mean", ms.mean},
                       {"stdError", ms.std_error},
                       {"q1", box.q1},
                       {"median", box.median},
                       {"q3", box.q3},
                       {"replications", result.replications}});
    }
  }
  out["summary"] = std::move(cells);
  return out;
}

NodeMeasure parse_node_measure(const std::string& token) {
  if (token == "goob") return NodeMeasure::kGiniOob;
  if (token == "pg0hat") return NodeMeasure::kPg0Hat;
  if (token == "pg2") return NodeMeasure::kPg2;
  throw DomainError("unknown node measure '" + token + "' (expected goob, pg0hat or pg2)");
}

std::string node_measure_name(NodeMeasure m) {
  switch (m) {
    case NodeMeasure::kGiniOob: return "goob";
    case NodeMeasure::kPg0Hat: return "pg0hat";
    case NodeMeasure::kPg2: default: return "pg2";
  }
}

namespace {

struct SimulatedNode {
  std::int64_t n = 0;
  std::int64_t pos = 0;
  double p() const { return static_cast<double>(pos) / static_cast<double>(n); }
};

double undoubled_gini(double p) { return p * (1.0 - p); }

}  // namespace

ExpectationResult expectation_test(int node_size, double p_oob, double left_fraction,
                                   std::int64_t trials, std::uint64_t seed,
                                   NodeMeasure measure) {
  if (node_size < 4) throw DomainError("expectation test needs node_size >= 4");
  if (trials < 10000) throw DomainError("expectation test needs >= 10000 trials");
  if (!(left_fraction > 0.0 && left_fraction < 1.0))
    throw DomainError("left fraction must be in (0, 1)");

  const bool needs_inbag = measure == NodeMeasure::kPg2;
  const std::int64_t min_child_oob = measure == NodeMeasure::kPg0Hat ? 2 : 1;

  PenaltySpec spec;
  switch (measure) {
    case NodeMeasure::kPg0Hat: spec = penalty::hat(penalty::pg0); break;
    case NodeMeasure::kPg2: spec = penalty::pg2; break;
    case NodeMeasure::kGiniOob: break;
  }

  auto rng = make_engine(seed);
  std::vector<std::int8_t> oob_labels(node_size), in_labels(node_size);

  double mean = 0.0, m2 = 0.0;
  std::int64_t redraws = 0;

  for (std::int64_t trial = 0; trial < trials; ++trial) {
    SimulatedNode oob_parent, oob_left, oob_right;
    SimulatedNode in_parent, in_left, in_right;

    for (;;) {
      oob_parent = oob_left = oob_right = SimulatedNode{};
      in_parent = in_left = in_right = SimulatedNode{};

      for (int i = 0; i < node_size; ++i) oob_labels[i] = bernoulli(rng, p_oob) ? 1 : 0;
      if (needs_inbag)
        for (int i = 0; i < node_size; ++i) in_labels[i] = bernoulli(rng, p_oob) ? 1 : 0;

      for (int i = 0; i < node_size; ++i) {
        auto& child = bernoulli(rng, left_fraction) ? oob_left : oob_right;
        child.n += 1;
        child.pos += oob_labels[i];
      }
      if (needs_inbag) {
        for (int i = 0; i < node_size; ++i) {
          auto& child = bernoulli(rng, left_fraction) ? in_left : in_right;
          child.n += 1;
          child.pos += in_labels[i];
        }
      }

      const bool ok = oob_left.n >= min_child_oob && oob_right.n >= min_child_oob &&
                      (!needs_inbag || (in_left.n >= 1 && in_right.n >= 1));
      if (ok) break;
      ++redraws;
    }

    oob_parent.n = node_size;
    oob_parent.pos = oob_left.pos + oob_right.pos;
    in_parent.n = node_size;
    in_parent.pos = in_left.pos + in_right.pos;

    // Child weights use OOB counts here (the node size in the variance is
    // the OOB sample size).
    const double w_l = static_cast<double>(oob_left.n) / static_cast<double>(oob_parent.n);
    const double w_r = static_cast<double>(oob_right.n) / static_cast<double>(oob_parent.n);

    double delta = 0.0;
    if (measure == NodeMeasure::kGiniOob) {
      delta = undoubled_gini(oob_parent.p()) - w_l * undoubled_gini(oob_left.p()) -
              w_r * undoubled_gini(oob_right.p());
    } else {
      auto value = [&](const SimulatedNode& o, const SimulatedNode& in) {
        return *penalized_impurity(o.p(), needs_inbag ? in.p() : 0.0, o.n, spec);
      };
      delta = value(oob_parent, in_parent) - w_l * value(oob_left, in_left) -
              w_r * value(oob_right, in_right);
    }

    const double d1 = delta - mean;
    mean += d1 / static_cast<double>(trial + 1);
    m2 += d1 * (delta - mean);
  }

  ExpectationResult res;
  res.empirical_mean = mean;
  res.theoretical_mean =
      measure == NodeMeasure::kGiniOob ? p_oob * (1.0 - p_oob) / static_cast<double>(node_size)
                                       : 0.0;
  res.std_error = std::sqrt(m2 / static_cast<double>(trials - 1)) /
                  std::sqrt(static_cast<double>(trials));
  res.trials = trials;
  res.redraws = redraws;
  return res;
}

}  // namespace oobgini
