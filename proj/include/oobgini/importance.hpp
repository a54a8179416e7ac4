#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oobgini/dataset.hpp"
#include "oobgini/forest.hpp"
#include "oobgini/tree.hpp"

namespace oobgini {

// One member of the penalized-Gini family:
//   alpha * I(p_oob) + (1 - alpha) * I(p_in) + lambda * (p_oob - p_in)^2
// with I(p) = 2p(1-p). With bias_corrected, the OOB impurity term is scaled
// by n_oob / (n_oob - 1) (sample-variance correction); the inbag term and the
// penalty are left untouched.
struct PenaltySpec {
  double alpha = 1.0;
  double lambda = 0.0;
  bool bias_corrected = false;

  bool operator==(const PenaltySpec&) const = default;
};

namespace penalty {
inline constexpr PenaltySpec pg0{1.0, 0.0, false};
inline constexpr PenaltySpec pg1{1.0, 1.0, false};
inline constexpr PenaltySpec pg2{0.5, 1.0, false};
inline constexpr PenaltySpec pg3{0.5, 0.5, false};
inline constexpr PenaltySpec hat(PenaltySpec s) { s.bias_corrected = true; return s; }
// Plain inbag Gini; the MDI node evaluation.
inline constexpr PenaltySpec inbag{0.0, 0.0, false};
}  // namespace penalty

// Impurity of one node under `spec`. Returns nullopt ("insufficient OOB
// support") when bias correction is requested with n_oob < 2.
std::optional<double> penalized_impurity(double p_oob, double p_in, std::int64_t n_oob,
                                         const PenaltySpec& spec);

// Impurity decrease of a split: PG(parent) - [w_l PG(left) + w_r PG(right)]
// with inbag-count weights. Returns nullopt (skip) when any of the three
// nodes lacks the OOB support the spec requires (n_oob = 0, or n_oob < 2
// under bias correction, for specs with alpha > 0 or lambda > 0).
std::optional<double> node_decrease(const NodeStats& parent, const NodeStats& left,
                                    const NodeStats& right, const PenaltySpec& spec);

struct FeatureDiagnostics {
  std::int64_t nodes_used = 0;
  std::int64_t nodes_skipped_zero_oob = 0;
};

struct ImportanceReport {
  std::string measure;
  std::vector<std::string> feature_names;
  std::vector<double> scores;
  std::vector<FeatureDiagnostics> diagnostics;
  bool truncated_at_zero = false;
};

// Mean decrease in impurity on inbag data:
// (1/ntree) * sum over nodes splitting on j of (N_m / N) * inbag Gini gain.
ImportanceReport mdi(const Forest& f, const Dataset& d, int threads = 0);

// Same node walk with the penalized impurity; nodes without OOB support
// contribute 0 and are counted in nodes_skipped_zero_oob. Negative totals are
// preserved unless truncate_negative.
ImportanceReport pg_importance(const Forest& f, const Dataset& d, const PenaltySpec& spec,
                               const std::string& name, bool truncate_negative = false,
                               int threads = 0);

// Permutation importance: per tree, OOB accuracy minus OOB accuracy after a
// seeded permutation of each feature within the OOB rows, averaged over trees
// and repeats. Raw (unnormalized) mean decrease in accuracy.
ImportanceReport mda(const Forest& f, const Dataset& d, int n_repeats, std::uint64_t seed,
                     int threads = 0);

// Measure selection shared by the CLI and the simulation harness.
struct Measure {
  enum class Kind { kMdi, kMda, kPg };
  Kind kind = Kind::kMdi;
  PenaltySpec spec;  // kPg only
  std::string name;
};

// Accepts mdi, mda, pg0..pg3, pg0hat, pg1hat, pg2hat.
Measure parse_measure(const std::string& token);
std::vector<Measure> parse_measures(const std::string& comma_list);

struct MeasureOptions {
  int mda_repeats = 1;
  std::uint64_t mda_seed = 0;
  bool truncate_negative = false;
  int threads = 0;
};

ImportanceReport compute_measure(const Measure& m, const Forest& f, const Dataset& d,
                                 const MeasureOptions& opts = {});

}  // namespace oobgini
