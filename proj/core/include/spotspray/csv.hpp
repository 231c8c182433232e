#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spotspray/controller.hpp"
#include "spotspray/detector.hpp"
#include "spotspray/fieldgen.hpp"
#include "spotspray/waterq.hpp"

namespace spotspray {

// Fixed CSV dialect used by every file the tool reads or writes: UTF-8, LF
// line endings, mandatory header row, '.' decimal separator, no thousands
// separators, no quoting (fields must not contain commas). List-valued cells
// use ';' between elements. Numbers are written in shortest
// round-trip form, so every file re-reads losslessly and reruns are
// byte-identical.
namespace csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

// Parses one numeric cell; SchemaError names the file row and column.
double parse_double(const std::string& cell, const std::string& file, std::size_t row_line,
                    const std::string& column);
std::int64_t parse_int(const std::string& cell, const std::string& file, std::size_t row_line,
                       const std::string& column);

Table read_table(const std::string& path);
void write_table(const std::string& path, const Table& table);

// Verifies the header matches exactly (names and order).
void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::string& path);

}  // namespace csv

// id,species,along_m,cross_m,detectability
void write_weeds_csv(const std::string& path, const std::vector<WeedInstance>& weeds);
std::vector<WeedInstance> read_weeds_csv(const std::string& path);

// nozzle,start_m,start_ms,duration_ms,volume_l
void write_events_csv(const std::string& path, const std::vector<SprayEvent>& events);
std::vector<SprayEvent> read_events_csv(const std::string& path);

// frame,tile,t_ms,predicted,truth_ids — `predicted` is one 0/1 digit per
// species class in enum order; `truth_ids` is ';'-joined weed ids.
void write_detections_csv(const std::string& path, const std::vector<DetectionRecord>& records);
std::vector<DetectionRecord> read_detections_csv(const std::string& path);

// t_min,flow_lps,conc_ugL — empty concentration cells mean "not assayed".
void write_runoff_csv(const std::string& path, const std::vector<RunoffSample>& samples);
std::vector<RunoffSample> read_runoff_csv(const std::string& path);

// One analyzed trial-treatment row of the trials table. Unknown cells stay
// empty (the measured tables omit some values).
struct TrialTableRow {
  int trial = 0;
  Treatment treatment = Treatment::blanket;
  std::optional<double> hit_rate_pct;
  std::optional<double> usage_l_ha;
  std::optional<std::int64_t> weeds_sprayed;
  std::optional<std::int64_t> weeds_missed;
  std::optional<std::int64_t> images_with_detection;
  std::optional<std::int64_t> images_total;
  std::optional<double> area_ha;
};

// trial,treatment,hit_rate_pct,usage_l_ha,weeds_sprayed,weeds_missed,
// images_with_detection,images_total,area_ha
void write_trials_csv(const std::string& path, const std::vector<TrialTableRow>& rows);
std::vector<TrialTableRow> read_trials_csv(const std::string& path);

// One measured runoff summary row (composite concentration + load).
struct RunoffTableRow {
  int trial = 0;
  std::string ingredient;
  Treatment treatment = Treatment::blanket;
  double conc_ugl = 0.0;
  double load_g_ha = 0.0;
};

// trial,ingredient,treatment,conc_ugl,load_g_ha
void write_runoff_table_csv(const std::string& path, const std::vector<RunoffTableRow>& rows);
std::vector<RunoffTableRow> read_runoff_table_csv(const std::string& path);

}  // namespace spotspray
