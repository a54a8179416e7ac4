#include "oobgini/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "oobgini/boxplot.hpp"
#include "oobgini/csv.hpp"
#include "oobgini/dataset.hpp"
#include "oobgini/errors.hpp"
#include "oobgini/forest.hpp"
#include "oobgini/importance.hpp"
#include "oobgini/numfmt.hpp"
#include "oobgini/rng.hpp"
#include "oobgini/serialize.hpp"
#include "oobgini/simlab.hpp"

namespace oobgini::cli {

namespace {

using nlohmann::ordered_json;

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write file: " + path);
  out << content;
  if (!out) throw DomainError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(tok);
  return out;
}

ordered_json kinds_json(const Dataset& d) {
  ordered_json out;
  for (const auto& f : d.features)
    out[f.name] = f.kind.is_categorical()
                      ? "categorical(" + std::to_string(f.kind.level_count) + ")"
                      : "continuous";
  return out;
}

std::string importance_csv(const std::vector<ImportanceReport>& reports,
                           const ordered_json& config) {
  std::string out = "# oobgini importance " + config.dump() + "\n";
  out += "feature,measure,score,nodesUsed,nodesSkipped\n";
  for (const auto& rep : reports)
    for (std::size_t j = 0; j < rep.feature_names.size(); ++j)
      out += csv_quote(rep.feature_names[j]) + "," + csv_quote(rep.measure) + "," +
             to_string_shortest(rep.scores[j]) + "," +
             std::to_string(rep.diagnostics[j].nodes_used) + "," +
             std::to_string(rep.diagnostics[j].nodes_skipped_zero_oob) + "\n";
  return out;
}

ordered_json importance_json(const std::vector<ImportanceReport>& reports,
                             const ordered_json& config) {
  ordered_json out;
  out["config"] = config;
  ordered_json jreports = ordered_json::array();
  for (const auto& rep : reports) {
    ordered_json jr;
    jr["measure"] = rep.measure;
    jr["truncatedAtZero"] = rep.truncated_at_zero;
    ordered_json scores = ordered_json::array();
    for (std::size_t j = 0; j < rep.feature_names.size(); ++j)
      scores.push_back({{"feature", rep.feature_names[j]},
                        {"score", rep.scores[j]},
                        {"nodesUsed", rep.diagnostics[j].nodes_used},
                        {"nodesSkipped", rep.diagnostics[j].nodes_skipped_zero_oob}});
    jr["scores"] = std::move(scores);
    jreports.push_back(std::move(jr));
  }
  out["reports"] = std::move(jreports);
  return out;
}

struct ImportanceArgs {
  std::string data;
  std::string schema_path;
  std::string response;
  std::string columns;  // comma list; empty = all
  std::string measures = "mdi,pg1,pg2";
  int ntree = 100;
  int mtry = 0;
  std::int64_t min_node_size = 1;
  int max_depth = -1;
  std::uint64_t seed = 42;
  int mda_repeats = 1;
  bool truncate_negative = false;
  bool drop_missing = false;
  std::vector<std::string> shuffle;
  std::string shuffle_suffix = "_shuffled";
  std::string dump_forest;
  std::string output = "-";
  std::string format = "csv";
  double alpha = -1.0;
  double lambda = -1.0;
  bool bias_corrected = false;
};

int run_importance(const ImportanceArgs& a) {
  LoadOptions load_options;
  if (!a.schema_path.empty()) load_options.schema = parse_schema_json(read_file(a.schema_path));
  load_options.response_column = a.response;
  load_options.missing = a.drop_missing ? MissingPolicy::kDropRow : MissingPolicy::kError;
  load_options.columns = split_list(a.columns);

  LoadReport load_report;
  Dataset d = load_csv(a.data, load_options, &load_report);

  const std::uint64_t forest_seed = derive_seed(a.seed, 1);
  const std::uint64_t shuffle_base = derive_seed(a.seed, 2);
  const std::uint64_t mda_seed = derive_seed(a.seed, 3);

  std::vector<std::uint64_t> shuffle_seeds;
  for (std::size_t i = 0; i < a.shuffle.size(); ++i) {
    shuffle_seeds.push_back(derive_seed(shuffle_base, i));
    d = shuffle_feature(d, a.shuffle[i], shuffle_seeds.back(), a.shuffle_suffix);
  }

  std::vector<Measure> measures = parse_measures(a.measures);
  if (a.alpha >= 0.0 || a.lambda >= 0.0 || a.bias_corrected) {
    PenaltySpec spec;
    spec.alpha = a.alpha >= 0.0 ? a.alpha : 1.0;
    spec.lambda = a.lambda >= 0.0 ? a.lambda : 0.0;
    spec.bias_corrected = a.bias_corrected;
    std::string name = "pg(alpha=" + to_string_shortest(spec.alpha) +
                       ",lambda=" + to_string_shortest(spec.lambda) +
                       (spec.bias_corrected ? ",hat" : "") + ")";
    measures.push_back({Measure::Kind::kPg, spec, name});
  }

  ForestParams params;
  params.ntree = a.ntree;
  params.mtry = a.mtry;
  params.min_node_size = a.min_node_size;
  params.max_depth = a.max_depth;
  params.seed = forest_seed;
  Forest forest = fit(d, params);

  MeasureOptions opts;
  opts.mda_repeats = a.mda_repeats;
  opts.mda_seed = mda_seed;
  opts.truncate_negative = a.truncate_negative;

  std::vector<ImportanceReport> reports;
  for (const auto& m : measures) reports.push_back(compute_measure(m, forest, d, opts));

  ordered_json config;
  config["command"] = "importance";
  config["data"] = a.data;
  config["response"] = a.response;
  if (!a.columns.empty()) config["selectedColumns"] = a.columns;
  config["columns"] = kinds_json(d);
  {
    ordered_json names = ordered_json::array();
    for (const auto& m : measures) names.push_back(m.name);
    config["measures"] = std::move(names);
  }
  config["ntree"] = forest.params.ntree;
  config["mtry"] = forest.params.mtry;
  config["minNodeSize"] = forest.params.min_node_size;
  config["maxDepth"] = forest.params.max_depth;
  config["seed"] = a.seed;
  config["forestSeed"] = forest_seed;
  config["mdaSeed"] = mda_seed;
  config["mdaRepeats"] = a.mda_repeats;
  if (!a.shuffle.empty()) {
    config["shuffled"] = a.shuffle;
    config["shuffleSeeds"] = shuffle_seeds;
  }
  config["truncateNegative"] = a.truncate_negative;
  config["dropMissing"] = a.drop_missing;
  config["rowsDroppedMissing"] = load_report.rows_dropped_missing;
  config["rows"] = d.n();

  if (!a.dump_forest.empty()) {
    ordered_json jf = forest_to_json(forest);
    jf["config"] = config;
    write_file(a.dump_forest, jf.dump(2) + "\n");
  }

  if (a.format == "json")
    write_file(a.output, importance_json(reports, config).dump(2) + "\n");
  else
    write_file(a.output, importance_csv(reports, config));
  return 0;
}

struct SimulateArgs {
  std::string sim_case;
  int replications = 100;
  int n = 120;
  std::string measures = "mdi,pg1,pg2";
  int ntree = 100;
  int mtry = 3;
  std::int64_t min_node_size = 1;
  int max_depth = -1;
  int mda_repeats = 1;
  std::uint64_t seed = 42;
  std::string output;
};

int run_simulate(const SimulateArgs& a) {
  SimDesign design;
  design.sim_case = parse_sim_case(a.sim_case);
  design.n = a.n;
  design.replications = a.replications;
  design.measures = parse_measures(a.measures);
  design.mda_repeats = a.mda_repeats;
  design.forest.ntree = a.ntree;
  design.forest.mtry = a.mtry;
  design.forest.min_node_size = a.min_node_size;
  design.forest.max_depth = a.max_depth;

  const SimResult result = run_study(design, a.seed);

  ordered_json config;
  config["command"] = "simulate";
  config["case"] = a.sim_case;
  config["replications"] = a.replications;
  config["n"] = a.n;
  config["measures"] = result.measure_names;
  config["ntree"] = a.ntree;
  config["mtry"] = a.mtry;
  config["minNodeSize"] = a.min_node_size;
  config["maxDepth"] = a.max_depth;
  config["mdaRepeats"] = a.mda_repeats;
  config["seed"] = a.seed;

  write_file(a.output + ".csv", sim_long_csv(result, config));

  ordered_json summary = sim_summary_json(result, config);
  {
    // Per-replication derived seeds, for replaying a single replication.
    ordered_json seeds = ordered_json::array();
    for (int r = 0; r < a.replications; ++r)
      seeds.push_back({{"data", derive_seed(a.seed, r, 0)},
                       {"forest", derive_seed(a.seed, r, 1)},
                       {"mda", derive_seed(a.seed, r, 2)}});
    summary["replicationSeeds"] = std::move(seeds);
  }
  write_file(a.output + ".summary.json", summary.dump(2) + "\n");
  return 0;
}

struct ExpectationArgs {
  std::string measure;
  std::string node_sizes = "5,10,20,50";
  std::string p_oobs = "0.1,0.3,0.5";
  double left_fraction = 0.5;
  std::int64_t trials = 100000;
  std::uint64_t seed = 42;
  std::string output;
};

int run_expectation(const ExpectationArgs& a) {
  const NodeMeasure measure = parse_node_measure(a.measure);

  std::vector<int> node_sizes;
  for (const auto& tok : split_list(a.node_sizes)) node_sizes.push_back(std::stoi(tok));
  std::vector<double> p_oobs;
  for (const auto& tok : split_list(a.p_oobs)) p_oobs.push_back(std::stod(tok));
  if (node_sizes.empty() || p_oobs.empty())
    throw DomainError("empty --node-sizes or --p-oobs grid");

  ordered_json config;
  config["command"] = "expectation";
  config["measure"] = a.measure;
  config["nodeSizes"] = node_sizes;
  config["pOobs"] = p_oobs;
  config["leftFraction"] = a.left_fraction;
  config["trials"] = a.trials;
  config["seed"] = a.seed;

  std::string out = "# oobgini expectation " + config.dump() + "\n";
  out += "measure,nodeSize,pOob,leftFraction,trials,empiricalMean,theoreticalMean,stdError,"
         "zScore,redraws\n";
  std::size_t cell = 0;
  for (int ns : node_sizes) {
    for (double p : p_oobs) {
      const auto res = expectation_test(ns, p, a.left_fraction, a.trials,
                                        derive_seed(a.seed, cell++), measure);
      const double z = (res.empirical_mean - res.theoretical_mean) /
                       (res.std_error > 0.0 ? res.std_error : 1.0);
      out += a.measure + "," + std::to_string(ns) + "," + to_string_shortest(p) + "," +
             to_string_shortest(a.left_fraction) + "," + std::to_string(res.trials) + "," +
             to_string_shortest(res.empirical_mean) + "," +
             to_string_shortest(res.theoretical_mean) + "," +
             to_string_shortest(res.std_error) + "," + to_string_shortest(z) + "," +
             std::to_string(res.redraws) + "\n";
    }
  }

  if (a.output.empty()) std::cout << out;
  else write_file(a.output, out);
  return 0;
}

struct PlotArgs {
  std::string input;
  std::string output;
  std::string panel_key = "measure";
  std::string box_key = "feature";
};

int run_plot(const PlotArgs& a) {
  const LongTable table = read_long_csv(a.input);
  ordered_json config;
  config["command"] = "plot";
  config["input"] = a.input;
  config["panelKey"] = a.panel_key;
  config["boxKey"] = a.box_key;
  write_file(a.output, render_boxplot_svg(table, a.panel_key, a.box_key, config));
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Random-forest variable importance with out-of-bag penalized Gini measures"};
  app.require_subcommand(1);

  ImportanceArgs ia;
  auto* imp = app.add_subcommand("importance",
                                 "Fit a forest on a CSV and report importance measures");
  imp->add_option("--data", ia.data, "Input CSV (header row required)")->required();
  imp->add_option("--schema", ia.schema_path,
                  "JSON column-kind map {\"col\": \"continuous\"|\"categorical\"}");
  imp->add_option("--response", ia.response, "Binary 0/1 response column")->required();
  imp->add_option("--columns", ia.columns,
                  "Comma list of feature columns to keep (default: all)");
  imp->add_option("--measures", ia.measures,
                  "Comma list of mdi, mda, pg0..pg3, pg0hat..pg2hat");
  imp->add_option("--ntree", ia.ntree, "Number of trees");
  imp->add_option("--mtry", ia.mtry, "Features tried per node (0 = floor(sqrt(p)))");
  imp->add_option("--min-node-size", ia.min_node_size, "Minimum inbag node size to split");
  imp->add_option("--max-depth", ia.max_depth, "Maximum tree depth (-1 = unlimited)");
  imp->add_option("--seed", ia.seed, "Master seed; all randomness derives from it");
  imp->add_option("--mda-repeats", ia.mda_repeats, "Permutation repeats for mda");
  imp->add_flag("--truncate-negative", ia.truncate_negative, "Clip negative scores at zero");
  imp->add_flag("--drop-missing", ia.drop_missing,
                "Drop rows with missing values instead of failing");
  imp->add_option("--shuffle", ia.shuffle,
                  "Append a shuffled copy of this feature (may repeat)");
  imp->add_option("--shuffle-suffix", ia.shuffle_suffix, "Name suffix for shuffled copies");
  imp->add_option("--dump-forest", ia.dump_forest, "Write the fitted forest as JSON");
  imp->add_option("--output", ia.output, "Output path ('-' = stdout)");
  imp->add_option("--format", ia.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  imp->add_option("--alpha", ia.alpha, "Extra family member: OOB weight in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  imp->add_option("--lambda", ia.lambda, "Extra family member: penalty weight >= 0")
      ->check(CLI::NonNegativeNumber);
  imp->add_flag("--bias-corrected", ia.bias_corrected,
                "Extra family member: sample-variance correction");

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Run the null/power simulation study");
  sim->add_option("--case", sa.sim_case, "null or power")->required();
  sim->add_option("--replications", sa.replications, "Number of replications");
  sim->add_option("--n", sa.n, "Rows per replication");
  sim->add_option("--measures", sa.measures, "Comma list of measures");
  sim->add_option("--ntree", sa.ntree, "Number of trees");
  sim->add_option("--mtry", sa.mtry, "Features tried per node");
  sim->add_option("--min-node-size", sa.min_node_size, "Minimum inbag node size to split");
  sim->add_option("--max-depth", sa.max_depth, "Maximum tree depth (-1 = unlimited)");
  sim->add_option("--mda-repeats", sa.mda_repeats, "Permutation repeats for mda");
  sim->add_option("--seed", sa.seed, "Master seed");
  sim->add_option("--output", sa.output,
                  "Output prefix; writes <prefix>.csv and <prefix>.summary.json")
      ->required();

  ExpectationArgs ea;
  auto* exp = app.add_subcommand(
      "expectation", "Monte-Carlo check of expected impurity decreases at a single node");
  exp->add_option("--measure", ea.measure, "goob, pg0hat or pg2")->required();
  exp->add_option("--node-sizes", ea.node_sizes, "Comma list of OOB node sizes");
  exp->add_option("--p-oobs", ea.p_oobs, "Comma list of true class proportions");
  exp->add_option("--left-fraction", ea.left_fraction, "Left-child assignment probability");
  exp->add_option("--trials", ea.trials, "Monte-Carlo trials per grid cell (>= 10000)");
  exp->add_option("--seed", ea.seed, "Master seed");
  exp->add_option("--output", ea.output, "Output CSV (default: stdout)");

  PlotArgs pa;
  auto* plot = app.add_subcommand("plot", "Render a long-format score CSV as SVG boxplots");
  plot->add_option("--input", pa.input, "Long CSV (replication,feature,measure,score)")
      ->required();
  plot->add_option("--output", pa.output, "Output SVG path")->required();
  plot->add_option("--panel-key", pa.panel_key, "Column that defines panels");
  plot->add_option("--box-key", pa.box_key, "Column that defines boxes within a panel");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << std::endl;
    return 2;
  }

  try {
    if (imp->parsed()) return run_importance(ia);
    if (sim->parsed()) return run_simulate(sa);
    if (exp->parsed()) return run_expectation(ea);
    if (plot->parsed()) return run_plot(pa);
    std::cerr << "usage error: no subcommand" << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace oobgini::cli
