#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spotspray/analysis.hpp"
#include "spotspray/csv.hpp"
#include "spotspray/waterq.hpp"

namespace spotspray {

// One analyzed trial, both treatments side by side. Fractions throughout;
// rendering converts to percentages. Missing cells stay empty in outputs.
struct TrialRow {
  int trial_id = 0;
  std::optional<double> hit_rate_blanket;
  std::optional<double> hit_rate_spot;
  std::optional<double> usage_blanket_l_ha;
  std::optional<double> usage_spot_l_ha;
  std::optional<double> efficacy;
  std::optional<double> reduction;
  std::optional<double> density_blanket;
  std::optional<double> density_spot;
};

struct UsageStatsBlock {
  double spot_mean = 0.0;
  double spot_sd = 0.0;
  int n_spot = 0;
  double blanket_mean = 0.0;
  double blanket_sd = 0.0;
  int n_blanket = 0;
  StatResult welch;                       // raw usage columns
  std::optional<StatResult> paired;       // per-trial differences (complete pairs)
  std::optional<double> knockdown_spot_mean;
  std::optional<double> knockdown_spot_sd;
  int n_knockdown_spot = 0;
  std::optional<double> knockdown_blanket_mean;
  std::optional<double> knockdown_blanket_sd;
  int n_knockdown_blanket = 0;
  std::optional<double> pearson_density_spot_usage;
};

struct WaterRow {
  int trial = 0;
  std::string ingredient;
  double conc_blanket_ugl = 0.0;
  double conc_spot_ugl = 0.0;
  double load_blanket_g_ha = 0.0;
  double load_spot_g_ha = 0.0;
  double conc_reduction = 0.0;  // fractions
  double load_reduction = 0.0;
};

struct WaterBlock {
  std::vector<WaterRow> rows;
  double mean_conc_blanket_ugl = 0.0;
  double mean_conc_spot_ugl = 0.0;
  double mean_load_blanket_g_ha = 0.0;
  double mean_load_spot_g_ha = 0.0;
  // Means of the unrounded per-row reductions (the published table's
  // average-row convention for its reduction cells).
  AggregateReductions aggregate;
};

struct ReportBundle {
  std::vector<TrialRow> trials;
  std::optional<TrialRow> average;
  std::optional<UsageStatsBlock> usage_stats;
  std::optional<WaterBlock> water;
  bool paper_compare = false;
  std::vector<std::string> notes;
  std::string input_hash_hex;  // provenance: config or input-file hash
  std::optional<std::uint64_t> seed;
  std::string version;
};

// --- reference values transcribed from the published field-trial report ---

struct PublishedTrial {
  int trial = 0;
  std::optional<double> hit_blanket_pct;
  std::optional<double> hit_spot_pct;
  double usage_blanket_l_ha = 0.0;
  double usage_spot_l_ha = 0.0;
  std::optional<int> efficacy_pct;
  int reduction_pct = 0;
};

struct PublishedWater {
  int trial = 0;
  std::string ingredient;
  double conc_blanket_ugl = 0.0;
  double load_blanket_g_ha = 0.0;
  double conc_spot_ugl = 0.0;
  double load_spot_g_ha = 0.0;
  int conc_reduction_pct = 0;
  int load_reduction_pct = 0;
};

struct PublishedStats {
  double spot_usage_mean = 132.0;
  double spot_usage_sd = 50.0;
  double blanket_usage_mean = 204.0;
  double blanket_usage_sd = 9.0;
  double usage_t = -4.5754;  // footnoted as a paired test
  double usage_p = 0.0007;
  double knockdown_spot_mean = 94.67;
  double knockdown_spot_sd = 4.44;
  double knockdown_blanket_mean = 98.33;
  double knockdown_blanket_sd = 1.37;
  double density_usage_r = 0.9824;
};

const std::vector<PublishedTrial>& published_trials();
const PublishedTrial& published_trial_average();
const std::vector<PublishedWater>& published_water();
const PublishedWater& published_water_average();
PublishedStats published_stats();

// The transcribed knockdown/usage table in trials-CSV form (two rows per
// trial), ready to feed back through the analyze path.
std::vector<TrialTableRow> published_trials_as_table();
// The transcribed water-quality table in runoff-table-CSV form.
std::vector<RunoffTableRow> published_water_as_table();

// --- builders ---

// Pairs up per-treatment rows into TrialRows. Every trial must contribute
// exactly one blanket and one spot row (SchemaError otherwise). Hit rates
// come from raw counts when present, else from the explicit percentage.
std::vector<TrialRow> pair_trial_rows(const std::vector<TrialTableRow>& rows);

// Column averages over the available cells; the reduction cell is the
// reduction of the averaged usages.
TrialRow average_trials(const std::vector<TrialRow>& trials);

// Usage statistics across trials; absent when fewer than two complete usage
// columns exist. Pearson r needs >= 3 trials with spot density and usage.
std::optional<UsageStatsBlock> compute_usage_stats(const std::vector<TrialRow>& trials);

// Groups measured runoff rows into blanket/spot pairs per (trial,
// ingredient); SchemaError when a pair is incomplete.
WaterBlock build_water_block(const std::vector<RunoffTableRow>& rows);

// Assembles the bundle: average row, statistics, standing modeling notes,
// and (with paper_compare) the published-value discrepancy notes.
ReportBundle build_report(std::vector<TrialRow> trials, std::optional<WaterBlock> water,
                          bool paper_compare, const std::string& input_hash_hex,
                          std::optional<std::uint64_t> seed);

// --- renderers ---

std::string render_report_text(const ReportBundle& bundle);
csv::Table render_trials_table(const ReportBundle& bundle);
csv::Table render_stats_table(const ReportBundle& bundle);
csv::Table render_water_table(const ReportBundle& bundle);  // requires bundle.water
std::string render_report_json(const ReportBundle& bundle);

enum class OutputFormat { csv, json };

// Writes report.txt plus either the three CSV tables or report.json into
// `dir` (which must exist).
void write_report_files(const std::string& dir, const ReportBundle& bundle, OutputFormat format);

}  // namespace spotspray
