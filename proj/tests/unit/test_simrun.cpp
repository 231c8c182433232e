#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "spotspray/simrun.hpp"

using namespace spotspray;
namespace fs = std::filesystem;

namespace {

// A small, fast trial: 2 strips of 2 rows x 60 m with a generous weed bank.
RunConfig small_config(std::uint64_t seed) {
  RunConfig config;
  config.seed = seed;
  config.field.seed = seed;
  config.field.target_density = 0.3;
  config.n_strips = 2;
  config.rows.rows_per_strip = 2;
  config.rows.strip_length_m = 60.0;
  config.first_treatment = Treatment::blanket;
  return config;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "spotspray_simrun_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("run_trial walks alternating strips over one shared field") {
  const RunConfig config = small_config(2024);
  const TrialResult result = run_trial(config);

  REQUIRE(result.layout.strips.size() == 2);
  CHECK(result.layout.strips[0].treatment == Treatment::blanket);
  CHECK(result.layout.strips[1].treatment == Treatment::spot);
  REQUIRE(result.strips.size() == 2);
  CHECK(result.strips[0].treatment == Treatment::blanket);
  CHECK(result.strips[1].treatment == Treatment::spot);
  CHECK(result.strips[0].geometry.cross_offset_m == 0.0);
  CHECK(result.strips[1].geometry.cross_offset_m ==
        doctest::Approx(3.2).epsilon(1e-12));

  CHECK_FALSE(result.field.empty());

  // Both strips image the same number of frames.
  CHECK(result.strips[0].log.images_total == result.strips[1].log.images_total);
  CHECK(result.strips[0].log.images_total > 0);

  // Blanket keeps every nozzle open, which reproduces the application rate.
  CHECK(result.strips[0].usage_l_ha == doctest::Approx(200.0).epsilon(1e-9));
  CHECK(result.blanket.usage_l_ha == doctest::Approx(200.0).epsilon(1e-9));
  CHECK(result.spot.usage_l_ha < result.blanket.usage_l_ha);
  CHECK(result.spot.usage_l_ha > 0.0);

  // Blanket coverage sprays every weed in its strip.
  CHECK(result.blanket.weeds_missed == 0);
  CHECK(result.blanket.weeds_sprayed > 0);

  // All of the field's weeds belong to exactly one strip.
  CHECK(result.blanket.weeds_sprayed + result.blanket.weeds_missed + result.spot.weeds_sprayed +
            result.spot.weeds_missed ==
        static_cast<std::int64_t>(result.field.size()));

  REQUIRE(result.summary.has_value());
  CHECK(result.summary->hit_rate_blanket == 1.0);
  CHECK(result.summary->hit_rate_spot > 0.5);
  CHECK(result.summary->usage_reduction_fraction ==
        doctest::Approx(1.0 - result.spot.usage_l_ha / result.blanket.usage_l_ha)
            .epsilon(1e-12));

  CHECK(result.spot.area_ha == doctest::Approx(2 * 1.6 * 60.0 / 1e4).epsilon(1e-12));
}

TEST_CASE("run_trial is deterministic in config and seed") {
  const RunConfig config = small_config(555);
  const TrialResult a = run_trial(config);
  const TrialResult b = run_trial(config);

  REQUIRE(a.field.size() == b.field.size());
  for (std::size_t i = 0; i < a.field.size(); ++i) {
    CHECK(a.field[i].id == b.field[i].id);
    CHECK(a.field[i].along_m == b.field[i].along_m);
    CHECK(a.field[i].cross_m == b.field[i].cross_m);
  }
  REQUIRE(a.strips.size() == b.strips.size());
  for (std::size_t s = 0; s < a.strips.size(); ++s) {
    const auto& ea = a.strips[s].log.spray_events;
    const auto& eb = b.strips[s].log.spray_events;
    REQUIRE(ea.size() == eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) {
      CHECK(ea[i].nozzle_id == eb[i].nozzle_id);
      CHECK(ea[i].start_ms == eb[i].start_ms);
      CHECK(ea[i].duration_ms == eb[i].duration_ms);
      CHECK(ea[i].volume_l == eb[i].volume_l);
    }
  }
  CHECK(a.spot.usage_l_ha == b.spot.usage_l_ha);

  const TrialResult c = run_trial(small_config(556));
  REQUIRE_FALSE(c.field.empty());
  CHECK(c.field[0].along_m != a.field[0].along_m);
}

TEST_CASE("a bare field with a silent detector sprays nothing in spot mode") {
  RunConfig config = small_config(9);
  config.field.target_density = 0.0;
  config.detector.false_positive_rate = 0.0;
  const TrialResult result = run_trial(config);

  CHECK(result.field.empty());
  CHECK(result.spot.usage_l_ha == 0.0);
  CHECK(result.strips[1].log.spray_events.empty());
  CHECK(result.blanket.usage_l_ha == doctest::Approx(200.0).epsilon(1e-9));
  CHECK_FALSE(result.summary.has_value());
  CHECK(result.strips[1].log.images_with_detection == 0);
}

TEST_CASE("four strips aggregate two passes per treatment") {
  RunConfig config = small_config(77);
  config.n_strips = 4;
  config.first_treatment = Treatment::spot;
  const TrialResult result = run_trial(config);

  REQUIRE(result.strips.size() == 4);
  CHECK(result.strips[0].treatment == Treatment::spot);
  CHECK(result.strips[1].treatment == Treatment::blanket);
  CHECK(result.strips[2].treatment == Treatment::spot);
  CHECK(result.strips[3].treatment == Treatment::blanket);
  CHECK(result.spot.area_ha == doctest::Approx(2 * result.strips[0].geometry.area_ha())
                                   .epsilon(1e-12));
  CHECK(result.spot.images_total ==
        result.strips[0].log.images_total + result.strips[2].log.images_total);
}

TEST_CASE("strip summaries round-trip through strips.csv") {
  std::vector<StripRow> rows;
  StripRow row;
  row.strip = 0;
  row.treatment = Treatment::blanket;
  row.usage_l_ha = 200.0;
  row.weeds_sprayed = 57;
  row.weeds_missed = 0;
  row.images_with_detection = 140;
  row.images_total = 614;
  row.area_ha = 0.0192;
  rows.push_back(row);
  row.strip = 1;
  row.treatment = Treatment::spot;
  row.usage_l_ha = 68.25;
  rows.push_back(row);

  const fs::path dir = fresh_dir("strips_roundtrip");
  const std::string path = (dir / "strips.csv").string();
  write_strips_csv(path, rows);
  const auto reread = read_strips_csv(path);
  REQUIRE(reread.size() == 2);
  CHECK(reread[0].treatment == Treatment::blanket);
  CHECK(reread[0].usage_l_ha == 200.0);
  CHECK(reread[0].weeds_sprayed == 57);
  CHECK(reread[0].images_total == 614);
  CHECK(reread[0].area_ha == 0.0192);
  CHECK(reread[1].strip == 1);
  CHECK(reread[1].treatment == Treatment::spot);

  std::ofstream bad((dir / "bad.csv").string(), std::ios::binary);
  bad << "strip,treatment\n0,blanket\n";
  bad.close();
  CHECK_THROWS_AS((void)read_strips_csv((dir / "bad.csv").string()), SchemaError);
}

TEST_CASE("per-strip file names encode index and treatment") {
  CHECK(strip_events_filename(0, Treatment::blanket) == "strip0_blanket_events.csv");
  CHECK(strip_events_filename(3, Treatment::spot) == "strip3_spot_events.csv");
  CHECK(strip_detections_filename(1, Treatment::spot) == "strip1_spot_detections.csv");
}

TEST_CASE("write_run_outputs emits the full deterministic file set") {
  RunConfig config = small_config(31337);
  GeoOrigin geo;
  geo.origin_lat = -19.25;
  geo.origin_lon = 146.8;
  geo.heading_deg = 0.0;
  config.geo = geo;
  config.runoff_fraction = 0.015;
  config.runoff_volume_l_ha = 250000.0;
  config.config_hash = fnv1a64("synthetic config");

  const TrialResult result = run_trial(config);
  const fs::path dir = fresh_dir("outputs_a");
  const ReportBundle bundle =
      write_run_outputs(config, result, dir.string(), OutputFormat::csv);

  const char* expected[] = {
      "field.csv",
      "strips.csv",
      "trials.csv",
      "strip0_blanket_events.csv",
      "strip0_blanket_detections.csv",
      "strip1_spot_events.csv",
      "strip1_spot_detections.csv",
      "spray_map.geojson",
      "runoff.csv",
      "report.txt",
      "report_trials.csv",
      "report_stats.csv",
      "report_water.csv",
  };
  for (const char* name : expected) {
    INFO(name);
    CHECK(fs::exists(dir / name));
  }
  CHECK_FALSE(fs::exists(dir / "report.json"));

  CHECK(bundle.water.has_value());
  REQUIRE(bundle.trials.size() == 1);
  CHECK(bundle.trials[0].usage_blanket_l_ha == doctest::Approx(200.0).epsilon(1e-9));
  CHECK(bundle.input_hash_hex == hash_hex(config.config_hash));
  REQUIRE(bundle.seed.has_value());
  CHECK(*bundle.seed == 31337ULL);
  // One trial cannot feed the two-sample statistics.
  CHECK_FALSE(bundle.usage_stats.has_value());

  const auto strips = read_strips_csv((dir / "strips.csv").string());
  REQUIRE(strips.size() == 2);
  CHECK(strips[0].treatment == Treatment::blanket);
  CHECK(strips[1].treatment == Treatment::spot);
  CHECK(strips[0].weeds_missed == 0);

  const auto trials = read_trials_csv((dir / "trials.csv").string());
  REQUIRE(trials.size() == 2);
  CHECK(trials[0].treatment == Treatment::blanket);
  CHECK(trials[1].treatment == Treatment::spot);
  REQUIRE(trials[0].usage_l_ha.has_value());
  CHECK(*trials[0].usage_l_ha == doctest::Approx(200.0).epsilon(1e-9));

  const auto field = read_weeds_csv((dir / "field.csv").string());
  CHECK(field.size() == result.field.size());

  // The same config and seed must reproduce every output byte.
  const fs::path dir2 = fresh_dir("outputs_b");
  write_run_outputs(config, run_trial(config), dir2.string(), OutputFormat::csv);
  std::set<std::string> names_a;
  for (const auto& entry : fs::directory_iterator(dir)) {
    names_a.insert(entry.path().filename().string());
  }
  std::set<std::string> names_b;
  for (const auto& entry : fs::directory_iterator(dir2)) {
    names_b.insert(entry.path().filename().string());
  }
  CHECK(names_a == names_b);
  for (const std::string& name : names_a) {
    INFO(name);
    CHECK(read_bytes(dir / name) == read_bytes(dir2 / name));
  }
}

TEST_CASE("json format swaps the csv reports for report.json") {
  RunConfig config = small_config(11);
  const TrialResult result = run_trial(config);
  const fs::path dir = fresh_dir("outputs_json");
  write_run_outputs(config, result, dir.string(), OutputFormat::json);

  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK_FALSE(fs::exists(dir / "report_trials.csv"));
  CHECK_FALSE(fs::exists(dir / "spray_map.geojson"));  // no geo origin configured
  CHECK_FALSE(fs::exists(dir / "runoff.csv"));         // no runoff block configured
}
