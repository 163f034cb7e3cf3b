#include "patrol/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace patrol {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

SummaryRow summary_row(const ExperimentSummary& s, const std::string& en) {
  SummaryRow row;
  row.en = en;
  row.ns = s.n_sensors;
  row.ad = s.AD;
  row.zd = s.ZD;
  row.af = s.AF;
  row.d1s = s.D1S;
  row.d2s = s.D2S;
  row.d3s = s.D3S;
  row.tv = s.target_speed;
  return row;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows,
                       const std::vector<std::string>& footers) {
  out << "EN,NS,AD,ZD,AF,D1S,D2S,D3S,TV\n";
  for (const SummaryRow& r : rows) {
    out << r.en << ',' << r.ns << ',' << fmt(r.ad) << ',' << fmt(r.zd) << ','
        << fmt(r.af) << ',' << fmt(r.d1s) << ',' << fmt(r.d2s) << ','
        << fmt(r.d3s) << ',' << fmt(r.tv) << '\n';
  }
  for (const std::string& f : footers) out << "# " << f << '\n';
}

ComparisonReport run_compare(const ScenarioConfig& config,
                             const StatsTable& stats,
                             const CompareOptions& options) {
  if (options.strategies.empty())
    throw std::invalid_argument("run_compare: no strategies given");
  if (options.n_seeds < 1)
    throw std::invalid_argument("run_compare: n_seeds must be >= 1");

  const std::size_t n_strategies = options.strategies.size();
  const std::size_t n_seeds = static_cast<std::size_t>(options.n_seeds);

  ComparisonReport report;
  report.per_seed.assign(n_strategies,
                         std::vector<ExperimentSummary>(n_seeds));
  report.stream_checksums.assign(n_seeds, 0);

  // Seed groups are independent; strategies within a group share the
  // baseline's recorded stream and must run in order.
  const std::int64_t ns = static_cast<std::int64_t>(n_seeds);
#pragma omp parallel for schedule(dynamic) if (options.exec == Exec::parallel)
  for (std::int64_t i = 0; i < ns; ++i) {
    ScenarioConfig run_cfg = config;
    run_cfg.seed = options.base_seed + static_cast<std::uint64_t>(i);

    std::vector<SpawnEvent> stream;
    for (std::size_t s = 0; s < n_strategies; ++s) {
      run_cfg.strategy = options.strategies[s];
      RunOptions ro;
      // Nested parallelism is disabled by default; inner rounds run serial.
      ro.exec = options.exec;
      if (s == 0)
        ro.record = &stream;
      else
        ro.replay = &stream;
      report.per_seed[s][static_cast<size_t>(i)] =
          run_experiment(run_cfg, &stats, ro);
    }
    report.stream_checksums[static_cast<size_t>(i)] =
        report.per_seed[0][static_cast<size_t>(i)].spawn_checksum;
  }

  // Every strategy in a seed group must have consumed the same traffic.
  for (std::size_t i = 0; i < n_seeds; ++i)
    for (std::size_t s = 1; s < n_strategies; ++s)
      if (report.per_seed[s][i].spawn_checksum != report.stream_checksums[i])
        throw std::logic_error(
            "run_compare: replay consumed a different spawn stream");

  for (std::size_t s = 0; s < n_strategies; ++s) {
    SummaryRow row;
    row.en = strategy_label(options.strategies[s]);
    row.ns = report.per_seed[s][0].n_sensors;
    row.tv = report.per_seed[s][0].target_speed;
    for (const ExperimentSummary& e : report.per_seed[s]) {
      row.ad += e.AD;
      row.zd += e.ZD;
      row.af += e.AF;
      row.d1s += e.D1S;
      row.d2s += e.D2S;
      row.d3s += e.D3S;
    }
    const double n = static_cast<double>(n_seeds);
    row.ad /= n;
    row.zd /= n;
    row.af /= n;
    row.d1s /= n;
    row.d2s /= n;
    row.d3s /= n;
    report.rows.push_back(row);
  }

  for (std::size_t s = 1; s < n_strategies; ++s) {
    PairDelta d;
    d.baseline = strategy_label(options.strategies[0]);
    d.other = strategy_label(options.strategies[s]);
    double af_sum = 0, af_sq = 0, d2_sum = 0, d2_sq = 0;
    int af_pos = 0, d2_neg = 0;
    for (std::size_t i = 0; i < n_seeds; ++i) {
      const double daf = report.per_seed[0][i].AF - report.per_seed[s][i].AF;
      const double dd2 =
          report.per_seed[0][i].D2S - report.per_seed[s][i].D2S;
      af_sum += daf;
      af_sq += daf * daf;
      d2_sum += dd2;
      d2_sq += dd2 * dd2;
      if (daf > 0) ++af_pos;
      if (dd2 < 0) ++d2_neg;
    }
    const double n = static_cast<double>(n_seeds);
    d.d_af_mean = af_sum / n;
    d.d_d2s_mean = d2_sum / n;
    d.d_af_std = std::sqrt(std::max(0.0, af_sq / n - d.d_af_mean * d.d_af_mean));
    d.d_d2s_std =
        std::sqrt(std::max(0.0, d2_sq / n - d.d_d2s_mean * d.d_d2s_mean));
    d.d_af_positive_frac = af_pos / n;
    d.d_d2s_negative_frac = d2_neg / n;
    report.deltas.push_back(d);
  }
  return report;
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  std::vector<std::string> footers;
  for (const PairDelta& d : report.deltas) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "pair %s vs %s: dAF mean=%.6g std=%.6g positive_frac=%.6g; "
                  "dD2S mean=%.6g std=%.6g negative_frac=%.6g",
                  d.baseline.c_str(), d.other.c_str(), d.d_af_mean, d.d_af_std,
                  d.d_af_positive_frac, d.d_d2s_mean, d.d_d2s_std,
                  d.d_d2s_negative_frac);
    footers.push_back(buf);
  }
  for (std::size_t i = 0; i < report.stream_checksums.size(); ++i) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "seed_group %zu: spawn stream checksum %016llx shared by "
                  "all strategies",
                  i,
                  static_cast<unsigned long long>(report.stream_checksums[i]));
    footers.push_back(buf);
  }
  write_summary_csv(out, report.rows, footers);
}

}  // namespace patrol
