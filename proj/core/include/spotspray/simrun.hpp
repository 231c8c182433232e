#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spotspray/analysis.hpp"
#include "spotspray/config.hpp"
#include "spotspray/controller.hpp"
#include "spotspray/fieldgen.hpp"
#include "spotspray/report.hpp"

namespace spotspray {

// One strip's pass plus everything derived from it.
struct StripOutcome {
  int strip_index = 0;
  Treatment treatment = Treatment::blanket;
  StripGeometry geometry;
  PassLog log;
  CoverageResult coverage;
  double usage_l_ha = 0.0;
  std::optional<double> weed_density;  // images with a detection / images
};

// Full outcome of one simulated trial (all strips of one config+seed run).
struct TrialResult {
  TrialLayout layout;
  std::vector<WeedInstance> field;
  std::vector<StripOutcome> strips;
  TreatmentStats spot;
  TreatmentStats blanket;
  // Absent when either treatment saw no weeds (e.g. zero-density runs).
  std::optional<TrialSummary> summary;
};

// Runs every strip of the configured trial. Deterministic in (config, seed):
// the field and each pass draw from fixed substreams of the run seed.
TrialResult run_trial(const RunConfig& config);

// Per-strip summary row of the run output (strips.csv).
struct StripRow {
  int strip = 0;
  Treatment treatment = Treatment::blanket;
  double usage_l_ha = 0.0;
  std::int64_t weeds_sprayed = 0;
  std::int64_t weeds_missed = 0;
  std::int64_t images_with_detection = 0;
  std::int64_t images_total = 0;
  double area_ha = 0.0;
};

// strip,treatment,usage_l_ha,weeds_sprayed,weeds_missed,
// images_with_detection,images_total,area_ha
void write_strips_csv(const std::string& path, const std::vector<StripRow>& rows);
std::vector<StripRow> read_strips_csv(const std::string& path);

// Writes the run's deterministic output set into `out_dir`: field.csv,
// strips.csv, trials.csv, per-strip event and detection CSVs, the report
// files, and spray_map.geojson when a geo origin is configured. Returns the
// report bundle it wrote. With `paper_compare` the report carries the
// published reference values and deltas alongside the simulated results.
ReportBundle write_run_outputs(const RunConfig& config, const TrialResult& result,
                               const std::string& out_dir, OutputFormat format,
                               bool paper_compare = false);

// Event/detection CSV names for one strip, e.g. "strip0_blanket_events.csv".
std::string strip_events_filename(int strip_index, Treatment treatment);
std::string strip_detections_filename(int strip_index, Treatment treatment);

}  // namespace spotspray
