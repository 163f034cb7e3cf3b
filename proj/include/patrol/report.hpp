#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "patrol/simulator.hpp"

namespace patrol {

/// One line of the summary table.  Column set and order mirror the metric
/// abbreviations: EN (experiment/strategy label), NS (sensor count),
/// AD (mean detected per step), ZD (mean undetected per step),
/// AF = AD/(AD+ZD), DkS (mean count of targets seen by exactly k sensors),
/// TV (target velocity).
struct SummaryRow {
  std::string en;
  int ns = 0;
  double ad = 0, zd = 0, af = 0;
  double d1s = 0, d2s = 0, d3s = 0;
  double tv = 0;
};

SummaryRow summary_row(const ExperimentSummary& summary,
                       const std::string& en);

/// Header is exactly "EN,NS,AD,ZD,AF,D1S,D2S,D3S,TV"; footer lines are
/// emitted verbatim as "# ..." comments after the data.
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const std::vector<std::string>& footers = {});

struct CompareOptions {
  std::vector<Strategy> strategies;  // first entry is the baseline
  std::uint64_t base_seed = 1;
  int n_seeds = 1;
  Exec exec = Exec::parallel;
};

/// Paired difference between the baseline strategy and one alternative,
/// per-seed deltas defined baseline minus alternative.
struct PairDelta {
  std::string baseline;
  std::string other;
  double d_af_mean = 0, d_af_std = 0;
  double d_af_positive_frac = 0;  // seeds where the baseline's AF is higher
  double d_d2s_mean = 0, d_d2s_std = 0;
  double d_d2s_negative_frac = 0;  // seeds where the baseline overlaps less
};

struct ComparisonReport {
  std::vector<SummaryRow> rows;  // one aggregated row per strategy
  std::vector<std::vector<ExperimentSummary>> per_seed;  // [strategy][seed]
  std::vector<PairDelta> deltas;                         // empty if single
  std::vector<std::uint64_t> stream_checksums;           // one per seed
};

/// Runs every (strategy, seed) pair on identical target traffic: the
/// baseline run records its spawn stream and the alternatives replay it.
/// Equality of the consumed-stream checksums is asserted.  Seeds run
/// concurrently under Exec::parallel.
ComparisonReport run_compare(const ScenarioConfig& config,
                             const StatsTable& stats,
                             const CompareOptions& options);

void write_comparison_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace patrol
