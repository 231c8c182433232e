#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spotspray/config.hpp"
#include "spotspray/csv.hpp"
#include "spotspray/errors.hpp"
#include "spotspray/fieldgen.hpp"
#include "spotspray/geojson.hpp"
#include "spotspray/report.hpp"
#include "spotspray/simrun.hpp"
#include "spotspray/units.hpp"
#include "spotspray/waterq.hpp"

namespace {

using namespace spotspray;

OutputFormat parse_format(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + name + "' (expected csv or json)");
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
}

struct SimulateArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "csv";
  bool paper_compare = false;
};

int do_simulate(const SimulateArgs& args) {
  RunConfig config = load_run_config(args.config_path);
  if (args.seed) config.seed = *args.seed;
  const std::string out_dir = args.out_dir.empty() ? config.out_dir : args.out_dir;
  const TrialResult result = run_trial(config);
  write_run_outputs(config, result, out_dir, parse_format(args.format), args.paper_compare);
  std::cout << "simulated " << result.strips.size() << " strips (" << result.field.size()
            << " weeds); outputs in " << out_dir << "\n";
  return 0;
}

struct AnalyzeArgs {
  std::string trials_path;
  std::string runoff_table_path;
  std::string runoff_manifest_path;
  std::string out_dir = "out";
  std::string format = "csv";
  bool paper_compare = false;
  double first_sample_delay_min = 1.0;
  double aliquot_volume_ml = 100.0;
  double composite_bottle_l = 1.0;
  double trigger_volume_l = 0.0;
};

// Manifest schema: trial,ingredient,treatment,area_ha,samples_path. Each
// samples file is a t_min,flow_lps,conc_ugL series; relative sample paths
// resolve against the manifest's directory.
std::vector<RunoffTableRow> rows_from_manifest(const AnalyzeArgs& args, std::string* hashed) {
  if (args.trigger_volume_l <= 0.0) {
    throw ConfigError("--runoff-manifest needs --trigger-volume-l > 0 for composite sampling");
  }
  SamplingPlan plan;
  plan.first_sample_delay_min = args.first_sample_delay_min;
  plan.aliquot_volume_ml = args.aliquot_volume_ml;
  plan.composite_bottle_l = args.composite_bottle_l;
  plan.trigger_volume_l = args.trigger_volume_l;
  plan.validate();

  const csv::Table table = csv::read_table(args.runoff_manifest_path);
  csv::require_header(table, {"trial", "ingredient", "treatment", "area_ha", "samples_path"},
                      args.runoff_manifest_path);
  if (table.rows.empty()) {
    throw SchemaError(args.runoff_manifest_path + ": no data rows");
  }
  const std::filesystem::path base = std::filesystem::path(args.runoff_manifest_path).parent_path();

  std::vector<RunoffTableRow> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& cells = table.rows[i];
    const std::size_t line = i + 2;
    RunoffTableRow row;
    row.trial = static_cast<int>(
        csv::parse_int(cells[0], args.runoff_manifest_path, line, "trial"));
    row.ingredient = cells[1];
    if (row.ingredient.empty()) {
      throw SchemaError(args.runoff_manifest_path + " row " + std::to_string(line) +
                        ": column 'ingredient': must not be empty");
    }
    const auto treatment = treatment_from_string(cells[2]);
    if (!treatment) {
      throw SchemaError(args.runoff_manifest_path + " row " + std::to_string(line) +
                        ": column 'treatment': unknown treatment '" + cells[2] + "'");
    }
    row.treatment = *treatment;
    const double area_ha =
        csv::parse_double(cells[3], args.runoff_manifest_path, line, "area_ha");
    std::filesystem::path samples_path(cells[4]);
    if (samples_path.is_relative()) samples_path = base / samples_path;
    const std::vector<RunoffSample> samples = read_runoff_csv(samples_path.string());
    *hashed += read_file_bytes(samples_path.string());
    row.conc_ugl = composite_concentration(samples, plan);
    row.load_g_ha = event_load(samples, area_ha);
    rows.push_back(row);
  }
  return rows;
}

int do_analyze(const AnalyzeArgs& args) {
  const bool bundled = args.trials_path.empty() && args.runoff_table_path.empty() &&
                       args.runoff_manifest_path.empty();
  if (bundled && !args.paper_compare) {
    throw ConfigError(
        "analyze needs at least one of --trials, --runoff-table, --runoff-manifest");
  }

  std::vector<TrialRow> trials;
  std::optional<WaterBlock> water;
  std::string hashed;
  std::optional<std::uint64_t> seed;

  if (bundled) {
    // The paper-compare subcommand: run the analysis over the bundled
    // tables transcribed from the published field-trial report.
    hashed = "bundled-published-tables-v1";
    trials = pair_trial_rows(published_trials_as_table());
    water = build_water_block(published_water_as_table());
  } else {
    if (!args.trials_path.empty()) {
      const std::vector<TrialTableRow> rows = read_trials_csv(args.trials_path);
      if (rows.empty()) throw SchemaError(args.trials_path + ": no data rows");
      hashed += read_file_bytes(args.trials_path);
      trials = pair_trial_rows(rows);
    }
    std::vector<RunoffTableRow> runoff_rows;
    if (!args.runoff_table_path.empty()) {
      std::vector<RunoffTableRow> rows = read_runoff_table_csv(args.runoff_table_path);
      if (rows.empty()) throw SchemaError(args.runoff_table_path + ": no data rows");
      hashed += read_file_bytes(args.runoff_table_path);
      runoff_rows.insert(runoff_rows.end(), rows.begin(), rows.end());
    }
    if (!args.runoff_manifest_path.empty()) {
      hashed += read_file_bytes(args.runoff_manifest_path);
      std::vector<RunoffTableRow> rows = rows_from_manifest(args, &hashed);
      runoff_rows.insert(runoff_rows.end(), rows.begin(), rows.end());
    }
    if (!runoff_rows.empty()) water = build_water_block(runoff_rows);
  }

  const ReportBundle bundle = build_report(std::move(trials), std::move(water),
                                           args.paper_compare, hash_hex(fnv1a64(hashed)), seed);
  ensure_dir(args.out_dir);
  write_report_files(args.out_dir, bundle, parse_format(args.format));
  std::cout << "analyzed " << bundle.trials.size() << " trials; report in " << args.out_dir
            << "\n";
  return 0;
}

struct SprayMapArgs {
  std::string config_path;
  std::string run_dir;
  std::string out_dir;
};

int do_spray_map(const SprayMapArgs& args) {
  const RunConfig config = load_run_config(args.config_path);
  if (!config.geo) {
    throw ConfigError(args.config_path + ": spray-map needs a [geo] section with an origin");
  }
  const TrialLayout layout =
      layout_trial(config.n_strips, config.rows.rows_per_strip, config.rows.row_width_m,
                   config.rows.strip_length_m, config.first_treatment);

  std::vector<PassLog> logs;
  for (std::size_t s = 0; s < layout.strips.size(); ++s) {
    const Strip& strip = layout.strips[s];
    PassLog log;
    log.treatment = strip.treatment;
    log.speed_kmh = config.speed_kmh;
    log.strip.cross_offset_m = layout.strip_cross_offset_m(static_cast<int>(s), config.rows);
    log.strip.rows = strip.rows_per_strip;
    log.strip.row_width_m = config.rows.row_width_m;
    log.strip.length_m = config.rows.strip_length_m;
    const std::string events_path =
        args.run_dir + "/" + strip_events_filename(static_cast<int>(s), strip.treatment);
    log.spray_events = read_events_csv(events_path);
    logs.push_back(std::move(log));
  }

  const std::string out_dir = args.out_dir.empty() ? args.run_dir : args.out_dir;
  ensure_dir(out_dir);
  write_text_file(out_dir + "/spray_map.geojson", emit_spray_map(logs, config.grid, *config.geo));
  std::cout << "wrote " << out_dir << "/spray_map.geojson\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"closed-loop spot-spray simulator and field-trial analytics"};
  app.set_version_flag("--version", std::string(spotspray::kVersion));
  app.require_subcommand(1);

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "run a configured trial simulation");
  sim->add_option("--config", sim_args.config_path, "run config file")->required();
  std::uint64_t sim_seed = 0;
  CLI::Option* sim_seed_opt =
      sim->add_option("--seed", sim_seed, "override the config seed");
  sim->add_option("--out", sim_args.out_dir, "output directory (default: config [output] dir)");
  sim->add_option("--format", sim_args.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  sim->add_flag("--paper-compare", sim_args.paper_compare,
                "add published reference values and deltas to the report");

  AnalyzeArgs an_args;
  CLI::App* an = app.add_subcommand("analyze", "analyze measured trial and runoff tables");
  an->add_option("--trials", an_args.trials_path, "per-treatment trial rows CSV");
  an->add_option("--runoff-table", an_args.runoff_table_path,
                 "measured runoff concentrations/loads CSV");
  an->add_option("--runoff-manifest", an_args.runoff_manifest_path,
                 "manifest of raw runoff sample series");
  an->add_option("--out", an_args.out_dir, "output directory");
  an->add_option("--format", an_args.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));
  an->add_flag("--paper-compare", an_args.paper_compare,
               "add published reference values and deltas to the report");
  an->add_option("--first-sample-delay-min", an_args.first_sample_delay_min,
                 "composite sampling: first aliquot delay (minutes)");
  an->add_option("--aliquot-ml", an_args.aliquot_volume_ml,
                 "composite sampling: aliquot volume (mL)");
  an->add_option("--bottle-l", an_args.composite_bottle_l,
                 "composite sampling: bottle capacity (L)");
  an->add_option("--trigger-volume-l", an_args.trigger_volume_l,
                 "composite sampling: flow volume between aliquots (L)");

  SprayMapArgs map_args;
  CLI::App* map = app.add_subcommand("spray-map", "render a run's spray events as GeoJSON");
  map->add_option("--config", map_args.config_path, "run config file")->required();
  map->add_option("--run", map_args.run_dir, "directory of a previous simulate run")->required();
  map->add_option("--out", map_args.out_dir, "output directory (default: the run directory)");

  AnalyzeArgs pc_args;
  pc_args.paper_compare = true;
  CLI::App* pc = app.add_subcommand(
      "paper-compare", "analyze the bundled tables transcribed from the published field trial");
  pc->add_option("--out", pc_args.out_dir, "output directory");
  pc->add_option("--format", pc_args.format, "report format")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // malformed invocations are config errors
  }

  try {
    if (app.got_subcommand(sim)) {
      if (sim_seed_opt->count() > 0) sim_args.seed = sim_seed;
      return do_simulate(sim_args);
    }
    if (app.got_subcommand(an)) return do_analyze(an_args);
    if (app.got_subcommand(map)) return do_spray_map(map_args);
    if (app.got_subcommand(pc)) return do_analyze(pc_args);
    throw spotspray::ConfigError("no subcommand given");
  } catch (const spotspray::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const spotspray::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 4;
  } catch (const spotspray::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
