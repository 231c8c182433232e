#include "spotspray/simrun.hpp"

#include <filesystem>
#include <fstream>
#include <utility>

#include "spotspray/csv.hpp"
#include "spotspray/errors.hpp"
#include "spotspray/geojson.hpp"
#include "spotspray/rng.hpp"
#include "spotspray/units.hpp"
#include "spotspray/waterq.hpp"

namespace spotspray {

namespace {

// Pass seeds live in a substream id range disjoint from the per-strip field
// streams (which use ids 0..n_strips-1 off the same root).
constexpr std::uint64_t kPassSeedBase = 0x100000000ULL;

}  // namespace

TrialResult run_trial(const RunConfig& config) {
  config.validate();

  TrialResult result;
  result.layout = layout_trial(config.n_strips, config.rows.rows_per_strip,
                               config.rows.row_width_m, config.rows.strip_length_m,
                               config.first_treatment);

  FieldSpec field_spec = config.field;
  field_spec.seed = config.seed;  // a --seed override must reseed the field too
  result.field = generate_field(field_spec, result.layout, config.rows);

  const double duration_ms = config.effective_spray_duration_ms();
  const double flow_lps = config.effective_flow_rate_lps();
  RngStream seed_root = RngStream::from_seed(config.seed);

  double spot_volume_l = 0.0;
  double blanket_volume_l = 0.0;
  for (std::size_t s = 0; s < result.layout.strips.size(); ++s) {
    const Strip& strip = result.layout.strips[s];
    StripGeometry geometry;
    geometry.cross_offset_m = result.layout.strip_cross_offset_m(static_cast<int>(s), config.rows);
    geometry.rows = strip.rows_per_strip;
    geometry.row_width_m = config.rows.row_width_m;
    geometry.length_m = config.rows.strip_length_m;

    const std::uint64_t pass_seed =
        seed_root.substream(kPassSeedBase + static_cast<std::uint64_t>(s)).next_u64();
    PassLog log = simulate_pass(result.field, geometry, strip.treatment, config.camera,
                                config.grid, config.detector, config.latency, config.speed_kmh,
                                duration_ms, flow_lps, pass_seed);

    StripOutcome outcome;
    outcome.strip_index = static_cast<int>(s);
    outcome.treatment = strip.treatment;
    outcome.geometry = geometry;
    outcome.coverage = coverage_hits(result.field, log, config.grid);
    outcome.usage_l_ha = usage_l_per_ha(log, geometry.area_ha());
    if (log.images_total > 0) {
      outcome.weed_density = weed_density(log.images_with_detection, log.images_total);
    }

    TreatmentStats& stats = (strip.treatment == Treatment::spot) ? result.spot : result.blanket;
    double& volume = (strip.treatment == Treatment::spot) ? spot_volume_l : blanket_volume_l;
    stats.weeds_sprayed += static_cast<std::int64_t>(outcome.coverage.sprayed.size());
    stats.weeds_missed += static_cast<std::int64_t>(outcome.coverage.missed.size());
    stats.images_total += log.images_total;
    stats.images_with_detection += log.images_with_detection;
    stats.area_ha += geometry.area_ha();
    for (const SprayEvent& event : log.spray_events) volume += event.volume_l;

    outcome.log = std::move(log);
    result.strips.push_back(std::move(outcome));
  }

  result.spot.usage_l_ha = spot_volume_l / result.spot.area_ha;
  result.blanket.usage_l_ha = blanket_volume_l / result.blanket.area_ha;
  const bool spot_has_weeds = result.spot.weeds_sprayed + result.spot.weeds_missed > 0;
  const bool blanket_has_weeds = result.blanket.weeds_sprayed + result.blanket.weeds_missed > 0;
  if (spot_has_weeds && blanket_has_weeds) {
    result.summary = summarize_trial(1, result.spot, result.blanket);
  }
  return result;
}

namespace {

const std::vector<std::string> kStripsHeader = {
    "strip",        "treatment",   "usage_l_ha",            "weeds_sprayed",
    "weeds_missed", "images_with_detection", "images_total", "area_ha"};

}  // namespace

void write_strips_csv(const std::string& path, const std::vector<StripRow>& rows) {
  csv::Table table;
  table.header = kStripsHeader;
  for (const StripRow& r : rows) {
    table.rows.push_back({std::to_string(r.strip), std::string(to_string(r.treatment)),
                          csv::format_double(r.usage_l_ha), std::to_string(r.weeds_sprayed),
                          std::to_string(r.weeds_missed),
                          std::to_string(r.images_with_detection), std::to_string(r.images_total),
                          csv::format_double(r.area_ha)});
  }
  csv::write_table(path, table);
}

std::vector<StripRow> read_strips_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  csv::require_header(table, kStripsHeader, path);
  std::vector<StripRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& cells = table.rows[i];
    const std::size_t line = i + 2;
    StripRow r;
    r.strip = static_cast<int>(csv::parse_int(cells[0], path, line, "strip"));
    const auto treatment = treatment_from_string(cells[1]);
    if (!treatment) {
      throw SchemaError(path + " row " + std::to_string(line) +
                        ": column 'treatment': unknown treatment '" + cells[1] + "'");
    }
    r.treatment = *treatment;
    r.usage_l_ha = csv::parse_double(cells[2], path, line, "usage_l_ha");
    r.weeds_sprayed = csv::parse_int(cells[3], path, line, "weeds_sprayed");
    r.weeds_missed = csv::parse_int(cells[4], path, line, "weeds_missed");
    r.images_with_detection = csv::parse_int(cells[5], path, line, "images_with_detection");
    r.images_total = csv::parse_int(cells[6], path, line, "images_total");
    r.area_ha = csv::parse_double(cells[7], path, line, "area_ha");
    rows.push_back(r);
  }
  return rows;
}

std::string strip_events_filename(int strip_index, Treatment treatment) {
  return "strip" + std::to_string(strip_index) + "_" + std::string(to_string(treatment)) +
         "_events.csv";
}

std::string strip_detections_filename(int strip_index, Treatment treatment) {
  return "strip" + std::to_string(strip_index) + "_" + std::string(to_string(treatment)) +
         "_detections.csv";
}

namespace {

TrialTableRow treatment_table_row(const TreatmentStats& stats, Treatment treatment) {
  TrialTableRow row;
  row.trial = 1;
  row.treatment = treatment;
  if (stats.weeds_sprayed + stats.weeds_missed > 0) {
    row.hit_rate_pct = hit_rate(stats.weeds_sprayed, stats.weeds_missed) * 100.0;
  }
  row.usage_l_ha = stats.usage_l_ha;
  row.weeds_sprayed = stats.weeds_sprayed;
  row.weeds_missed = stats.weeds_missed;
  row.images_with_detection = stats.images_with_detection;
  row.images_total = stats.images_total;
  row.area_ha = stats.area_ha;
  return row;
}

}  // namespace

ReportBundle write_run_outputs(const RunConfig& config, const TrialResult& result,
                               const std::string& out_dir, OutputFormat format,
                               bool paper_compare) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());

  write_weeds_csv(out_dir + "/field.csv", result.field);

  std::vector<StripRow> strip_rows;
  for (const StripOutcome& outcome : result.strips) {
    write_events_csv(out_dir + "/" + strip_events_filename(outcome.strip_index, outcome.treatment),
                     outcome.log.spray_events);
    write_detections_csv(
        out_dir + "/" + strip_detections_filename(outcome.strip_index, outcome.treatment),
        outcome.log.detections);
    StripRow row;
    row.strip = outcome.strip_index;
    row.treatment = outcome.treatment;
    row.usage_l_ha = outcome.usage_l_ha;
    row.weeds_sprayed = static_cast<std::int64_t>(outcome.coverage.sprayed.size());
    row.weeds_missed = static_cast<std::int64_t>(outcome.coverage.missed.size());
    row.images_with_detection = outcome.log.images_with_detection;
    row.images_total = outcome.log.images_total;
    row.area_ha = outcome.geometry.area_ha();
    strip_rows.push_back(row);
  }
  write_strips_csv(out_dir + "/strips.csv", strip_rows);

  const std::vector<TrialTableRow> trial_rows = {
      treatment_table_row(result.blanket, Treatment::blanket),
      treatment_table_row(result.spot, Treatment::spot),
  };
  write_trials_csv(out_dir + "/trials.csv", trial_rows);

  if (config.geo) {
    std::vector<PassLog> logs;
    logs.reserve(result.strips.size());
    for (const StripOutcome& outcome : result.strips) logs.push_back(outcome.log);
    const std::string doc = emit_spray_map(logs, config.grid, *config.geo);
    std::ofstream out(out_dir + "/spray_map.geojson", std::ios::binary);
    if (!out) throw IoError("cannot open '" + out_dir + "/spray_map.geojson' for writing");
    out << doc;
    if (!out) throw IoError("failed writing '" + out_dir + "/spray_map.geojson'");
  }

  std::optional<WaterBlock> water;
  if (config.runoff_fraction) {
    // Surrogate runoff: the applied dose scales with usage; labels make the
    // modeled origin explicit.
    std::vector<RunoffTableRow> runoff_rows;
    for (Treatment treatment : {Treatment::blanket, Treatment::spot}) {
      const TreatmentStats& stats = (treatment == Treatment::spot) ? result.spot : result.blanket;
      RunoffEvent event =
          simulate_runoff(stats.usage_l_ha, *config.runoff_fraction, *config.runoff_volume_l_ha);
      runoff_rows.push_back({1, "surrogate", treatment, event.composite_concentration_ugl,
                             event.load_g_ha});
    }
    write_runoff_table_csv(out_dir + "/runoff.csv", runoff_rows);
    water = build_water_block(runoff_rows);
  }

  ReportBundle bundle = build_report(pair_trial_rows(trial_rows), std::move(water),
                                     paper_compare, hash_hex(config.config_hash), config.seed);
  write_report_files(out_dir, bundle, format);
  return bundle;
}

}  // namespace spotspray
