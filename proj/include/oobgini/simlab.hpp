#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "oobgini/dataset.hpp"
#include "oobgini/forest.hpp"
#include "oobgini/importance.hpp"
#include "oobgini/stats.hpp"

namespace oobgini {

// Simulation designs: five predictors X1 (standard normal), X2..X5
// (uniform multinomial with 2, 4, 10, 20 categories). Null: the binary
// response is independent of everything. Power: P(y=1 | X2 = "1") = 0.35,
// P(y=1 | X2 = "2") = 0.65; the other predictors stay uninformative.
enum class SimCase { kNull, kPower };

SimCase parse_sim_case(const std::string& token);  // "null" | "power"

Dataset gen_case(SimCase sim_case, int n, std::uint64_t seed);

struct SimDesign {
  SimCase sim_case = SimCase::kNull;
  int n = 120;
  int replications = 100;
  ForestParams forest;  // forest.seed is ignored; per-replication seeds are derived
  std::vector<Measure> measures;
  int mda_repeats = 1;
};

struct SimResult {
  std::vector<std::string> feature_names;
  std::vector<std::string> measure_names;
  int replications = 0;
  std::vector<double> scores;  // [rep][feature][measure], row-major

  double score(int rep, int feature, int measure) const {
    const int nf = static_cast<int>(feature_names.size());
    const int nm = static_cast<int>(measure_names.size());
    return scores[(static_cast<std::size_t>(rep) * nf + feature) * nm + measure];
  }
  // All replication scores for one (feature, measure) cell.
  std::vector<double> cell(int feature, int measure) const;
};

// Per replication: generate data, fit a forest, compute every requested
// measure. Deterministic under master_seed for any thread count.
SimResult run_study(const SimDesign& design, std::uint64_t master_seed, int threads = 0);

// Long-format export (replication, feature, measure, score) with a '#'
// config envelope, and a JSON summary (mean, quartiles, stderr per cell).
std::string sim_long_csv(const SimResult& result, const nlohmann::ordered_json& config);
nlohmann::ordered_json sim_summary_json(const SimResult& result,
                                        const nlohmann::ordered_json& config);

// Node-level Monte-Carlo check of the expected impurity decrease under an
// uninformative split. One simulated node: node_size iid Bernoulli(p_oob)
// OOB labels (plus an independent inbag sample of the same size for measures
// that use it), rows assigned to children uniformly at random with
// left_fraction; trials with a child below the measure's required support
// are redrawn and counted. Child weights use OOB counts.
enum class NodeMeasure {
  kGiniOob,  // un-doubled OOB Gini p(1-p); expected decrease sigma^2 / node_size
  kPg0Hat,   // bias-corrected OOB Gini; expected decrease 0
  kPg2,      // symmetric penalized Gini; expected decrease 0
};

NodeMeasure parse_node_measure(const std::string& token);  // "goob" | "pg0hat" | "pg2"
std::string node_measure_name(NodeMeasure m);

struct ExpectationResult {
  double empirical_mean = 0.0;
  double theoretical_mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
  std::int64_t redraws = 0;
};

ExpectationResult expectation_test(int node_size, double p_oob, double left_fraction,
                                   std::int64_t trials, std::uint64_t seed, NodeMeasure measure);

}  // namespace oobgini
