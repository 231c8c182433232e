#include "spotspray/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace spotspray {

namespace csv {

std::string format_double(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw IoError("format_double: value not representable");
  return std::string(buf, end);
}

namespace {

std::string cell_context(const std::string& file, std::size_t row_line, const std::string& column) {
  std::ostringstream os;
  os << file << " row " << row_line << ": column '" << column << "'";
  return os.str();
}

}  // namespace

double parse_double(const std::string& cell, const std::string& file, std::size_t row_line,
                    const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw SchemaError(cell_context(file, row_line, column) + ": cannot parse '" + cell +
                      "' as a number");
  return value;
}

std::int64_t parse_int(const std::string& cell, const std::string& file, std::size_t row_line,
                       const std::string& column) {
  std::int64_t value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw SchemaError(cell_context(file, row_line, column) + ": cannot parse '" + cell +
                      "' as an integer");
  return value;
}

Table read_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.empty()) throw SchemaError(path + ": empty input file");

  Table table;
  std::size_t line_start = 0;
  std::size_t line_no = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string::npos) line_end = text.size();
    std::string line = text.substr(line_start, line_end - line_start);
    if (!line.empty() && line.back() == '\r') line.pop_back();  // tolerate CRLF input
    line_start = line_end + 1;
    if (line.empty() && line_start > text.size()) break;  // trailing newline
    line_no += 1;
    if (line.empty())
      throw SchemaError(path + " row " + std::to_string(line_no) + ": blank line");

    std::vector<std::string> fields;
    std::size_t field_start = 0;
    while (true) {
      const std::size_t comma = line.find(',', field_start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(field_start));
        break;
      }
      fields.push_back(line.substr(field_start, comma - field_start));
      field_start = comma + 1;
    }

    if (line_no == 1) {
      table.header = std::move(fields);
    } else {
      if (fields.size() != table.header.size())
        throw SchemaError(path + " row " + std::to_string(line_no) + ": expected " +
                          std::to_string(table.header.size()) + " columns, got " +
                          std::to_string(fields.size()));
      table.rows.push_back(std::move(fields));
    }
    if (line_end == text.size()) break;
  }
  if (table.header.empty()) throw SchemaError(path + ": missing header row");
  return table;
}

void write_table(const std::string& path, const Table& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  std::ostringstream text;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i > 0) text << ',';
    text << table.header[i];
  }
  text << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) text << ',';
      text << row[i];
    }
    text << '\n';
  }
  out << text.str();
  if (!out) throw IoError("failed writing '" + path + "'");
}

void require_header(const Table& table, const std::vector<std::string>& expected,
                    const std::string& path) {
  if (table.header != expected) {
    std::ostringstream os;
    os << path << " row 1: expected header ";
    for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? "," : "") << expected[i];
    os << " but got ";
    for (std::size_t i = 0; i < table.header.size(); ++i)
      os << (i ? "," : "") << table.header[i];
    throw SchemaError(os.str());
  }
}

}  // namespace csv

namespace {

using csv::format_double;
using csv::parse_double;
using csv::parse_int;

std::string format_int(std::int64_t value) { return std::to_string(value); }

// Data rows start on file line 2 (line 1 is the header).
std::size_t file_line(std::size_t row_index) { return row_index + 2; }

Treatment parse_treatment(const std::string& cell, const std::string& path, std::size_t line) {
  const auto treatment = treatment_from_string(cell);
  if (!treatment)
    throw SchemaError(path + " row " + std::to_string(line) +
                      ": column 'treatment': unknown treatment '" + cell + "'");
  return *treatment;
}

}  // namespace

void write_weeds_csv(const std::string& path, const std::vector<WeedInstance>& weeds) {
  csv::Table table;
  table.header = {"id", "species", "along_m", "cross_m", "detectability"};
  table.rows.reserve(weeds.size());
  for (const WeedInstance& weed : weeds) {
    table.rows.push_back({format_int(weed.id), std::string(to_string(weed.species)),
                          format_double(weed.along_m), format_double(weed.cross_m),
                          format_double(weed.detectability)});
  }
  csv::write_table(path, table);
}

std::vector<WeedInstance> read_weeds_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  csv::require_header(table, {"id", "species", "along_m", "cross_m", "detectability"}, path);
  std::vector<WeedInstance> weeds;
  weeds.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = file_line(i);
    WeedInstance weed;
    weed.id = parse_int(row[0], path, line, "id");
    const auto species = species_from_string(row[1]);
    if (!species)
      throw SchemaError(path + " row " + std::to_string(line) +
                        ": column 'species': unknown species '" + row[1] + "'");
    weed.species = *species;
    weed.along_m = parse_double(row[2], path, line, "along_m");
    weed.cross_m = parse_double(row[3], path, line, "cross_m");
    weed.detectability = parse_double(row[4], path, line, "detectability");
    if (!(weed.detectability > 0.0 && weed.detectability <= 1.0))
      throw SchemaError(path + " row " + std::to_string(line) +
                        ": column 'detectability': value must be in (0, 1]");
    weeds.push_back(weed);
  }
  return weeds;
}

void write_events_csv(const std::string& path, const std::vector<SprayEvent>& events) {
  csv::Table table;
  table.header = {"nozzle", "start_m", "start_ms", "duration_ms", "volume_l"};
  table.rows.reserve(events.size());
  for (const SprayEvent& event : events) {
    table.rows.push_back({format_int(event.nozzle_id), format_double(event.start_position_m),
                          format_double(event.start_ms), format_double(event.duration_ms),
                          format_double(event.volume_l)});
  }
  csv::write_table(path, table);
}

std::vector<SprayEvent> read_events_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  csv::require_header(table, {"nozzle", "start_m", "start_ms", "duration_ms", "volume_l"}, path);
  std::vector<SprayEvent> events;
  events.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = file_line(i);
    SprayEvent event;
    event.nozzle_id = static_cast<int>(parse_int(row[0], path, line, "nozzle"));
    event.start_position_m = parse_double(row[1], path, line, "start_m");
    event.start_ms = parse_double(row[2], path, line, "start_ms");
    event.duration_ms = parse_double(row[3], path, line, "duration_ms");
    event.volume_l = parse_double(row[4], path, line, "volume_l");
    if (!(event.duration_ms > 0.0))
      throw SchemaError(path + " row " + std::to_string(line) +
                        ": column 'duration_ms': must be > 0");
    events.push_back(event);
  }
  return events;
}

void write_detections_csv(const std::string& path, const std::vector<DetectionRecord>& records) {
  csv::Table table;
  table.header = {"frame", "tile", "t_ms", "predicted", "truth_ids"};
  table.rows.reserve(records.size());
  for (const DetectionRecord& record : records) {
    std::string predicted(kSpeciesCount, '0');
    for (int c = 0; c < kSpeciesCount; ++c)
      if (record.predicted[static_cast<std::size_t>(c)]) predicted[static_cast<std::size_t>(c)] = '1';
    std::string truth;
    for (std::size_t k = 0; k < record.truth_weed_ids.size(); ++k) {
      if (k > 0) truth += ';';
      truth += format_int(record.truth_weed_ids[k]);
    }
    table.rows.push_back({format_int(record.frame_id), format_int(record.tile_id),
                          format_double(record.t_ms), predicted, truth});
  }
  csv::write_table(path, table);
}

std::vector<DetectionRecord> read_detections_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  csv::require_header(table, {"frame", "tile", "t_ms", "predicted", "truth_ids"}, path);
  std::vector<DetectionRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = file_line(i);
    DetectionRecord record;
    record.frame_id = parse_int(row[0], path, line, "frame");
    record.tile_id = static_cast<int>(parse_int(row[1], path, line, "tile"));
    record.t_ms = parse_double(row[2], path, line, "t_ms");
    if (row[3].size() != static_cast<std::size_t>(kSpeciesCount))
      throw SchemaError(path + " row " + std::to_string(line) +
                        ": column 'predicted': expected " + std::to_string(kSpeciesCount) +
                        " class digits");
    for (int c = 0; c < kSpeciesCount; ++c) {
      const char digit = row[3][static_cast<std::size_t>(c)];
      if (digit != '0' && digit != '1')
        throw SchemaError(path + " row " + std::to_string(line) +
                          ": column 'predicted': digits must be 0 or 1");
      record.predicted[static_cast<std::size_t>(c)] = digit == '1';
    }
    if (!row[4].empty()) {
      std::size_t start = 0;
      while (true) {
        const std::size_t semi = row[4].find(';', start);
        const std::string token =
            semi == std::string::npos ? row[4].substr(start) : row[4].substr(start, semi - start);
        record.truth_weed_ids.push_back(parse_int(token, path, line, "truth_ids"));
        if (semi == std::string::npos) break;
        start = semi + 1;
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

void write_runoff_csv(const std::string& path, const std::vector<RunoffSample>& samples) {
  csv::Table table;
  table.header = {"t_min", "flow_lps", "conc_ugL"};
  table.rows.reserve(samples.size());
  for (const RunoffSample& sample : samples) {
    table.rows.push_back({format_double(sample.t_min), format_double(sample.flow_lps),
                          sample.conc_ugl ? format_double(*sample.conc_ugl) : std::string()});
  }
  csv::write_table(path, table);
}

std::vector<RunoffSample> read_runoff_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  csv::require_header(table, {"t_min", "flow_lps", "conc_ugL"}, path);
  std::vector<RunoffSample> samples;
  samples.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = file_line(i);
    RunoffSample sample;
    sample.t_min = parse_double(row[0], path, line, "t_min");
    sample.flow_lps = parse_double(row[1], path, line, "flow_lps");
    if (!row[2].empty()) sample.conc_ugl = parse_double(row[2], path, line, "conc_ugL");
    samples.push_back(sample);
  }
  return samples;
}

void write_trials_csv(const std::string& path, const std::vector<TrialTableRow>& rows) {
  csv::Table table;
  table.header = {"trial",         "treatment",   "hit_rate_pct",
                  "usage_l_ha",    "weeds_sprayed", "weeds_missed",
                  "images_with_detection", "images_total", "area_ha"};
  table.rows.reserve(rows.size());
  for (const TrialTableRow& row : rows) {
    auto opt_double = [](const std::optional<double>& v) {
      return v ? format_double(*v) : std::string();
    };
    auto opt_int = [](const std::optional<std::int64_t>& v) {
      return v ? format_int(*v) : std::string();
    };
    table.rows.push_back({format_int(row.trial), std::string(to_string(row.treatment)),
                          opt_double(row.hit_rate_pct), opt_double(row.usage_l_ha),
                          opt_int(row.weeds_sprayed), opt_int(row.weeds_missed),
                          opt_int(row.images_with_detection), opt_int(row.images_total),
                          opt_double(row.area_ha)});
  }
  csv::write_table(path, table);
}

std::vector<TrialTableRow> read_trials_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  csv::require_header(table,
                      {"trial", "treatment", "hit_rate_pct", "usage_l_ha", "weeds_sprayed",
                       "weeds_missed", "images_with_detection", "images_total", "area_ha"},
                      path);
  std::vector<TrialTableRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& raw = table.rows[i];
    const std::size_t line = file_line(i);
    TrialTableRow row;
    row.trial = static_cast<int>(parse_int(raw[0], path, line, "trial"));
    row.treatment = parse_treatment(raw[1], path, line);
    if (!raw[2].empty()) row.hit_rate_pct = parse_double(raw[2], path, line, "hit_rate_pct");
    if (!raw[3].empty()) row.usage_l_ha = parse_double(raw[3], path, line, "usage_l_ha");
    if (!raw[4].empty()) row.weeds_sprayed = parse_int(raw[4], path, line, "weeds_sprayed");
    if (!raw[5].empty()) row.weeds_missed = parse_int(raw[5], path, line, "weeds_missed");
    if (!raw[6].empty())
      row.images_with_detection = parse_int(raw[6], path, line, "images_with_detection");
    if (!raw[7].empty()) row.images_total = parse_int(raw[7], path, line, "images_total");
    if (!raw[8].empty()) row.area_ha = parse_double(raw[8], path, line, "area_ha");
    rows.push_back(row);
  }
  return rows;
}

void write_runoff_table_csv(const std::string& path, const std::vector<RunoffTableRow>& rows) {
  csv::Table table;
  table.header = {"trial", "ingredient", "treatment", "conc_ugl", "load_g_ha"};
  table.rows.reserve(rows.size());
  for (const RunoffTableRow& row : rows) {
    table.rows.push_back({format_int(row.trial), row.ingredient,
                          std::string(to_string(row.treatment)), format_double(row.conc_ugl),
                          format_double(row.load_g_ha)});
  }
  csv::write_table(path, table);
}

std::vector<RunoffTableRow> read_runoff_table_csv(const std::string& path) {
  const csv::Table table = csv::read_table(path);
  csv::require_header(table, {"trial", "ingredient", "treatment", "conc_ugl", "load_g_ha"}, path);
  std::vector<RunoffTableRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& raw = table.rows[i];
    const std::size_t line = file_line(i);
    RunoffTableRow row;
    row.trial = static_cast<int>(parse_int(raw[0], path, line, "trial"));
    if (raw[1].empty())
      throw SchemaError(path + " row " + std::to_string(line) +
                        ": column 'ingredient': must not be empty");
    row.ingredient = raw[1];
    row.treatment = parse_treatment(raw[2], path, line);
    row.conc_ugl = parse_double(raw[3], path, line, "conc_ugl");
    row.load_g_ha = parse_double(raw[4], path, line, "load_g_ha");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spotspray
