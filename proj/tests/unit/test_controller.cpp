#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "doctest.h"
#include "spotspray/controller.hpp"
#include "spotspray/fieldgen.hpp"
#include "spotspray/geometry.hpp"
#include "spotspray/rng.hpp"

using namespace spotspray;

namespace {

constexpr double kSpeedKmh = 8.0;
constexpr double kSpeedMps = 8.0 * 1000.0 / 3600.0;

DetectorProfile perfect_profile() {
  DetectorProfile p;
  p.true_positive_rate = {1.0, 1.0, 1.0};
  p.false_positive_rate = 0.0;
  return p;
}

LatencyProfile exact_latency() {
  LatencyProfile p;
  p.acquisition.sd_ms = 0.0;
  p.preprocessing.sd_ms = 0.0;
  p.inference.sd_ms = 0.0;
  p.solenoid.sd_ms = 0.0;
  return p;
}

StripGeometry one_lane_strip(double length_m) {
  StripGeometry strip;
  strip.cross_offset_m = 0.0;
  strip.rows = 1;
  strip.row_width_m = 1.6;
  strip.length_m = length_m;
  return strip;
}

WeedInstance weed_at(std::int64_t id, double along_m, double cross_m) {
  WeedInstance w;
  w.id = id;
  w.species = Species::nutgrass;
  w.along_m = along_m;
  w.cross_m = cross_m;
  w.detectability = 1.0;
  return w;
}

}  // namespace

TEST_CASE("latency profile defaults sum to 58.16 ms exactly") {
  const LatencyProfile profile;
  CHECK(profile.acquisition.mean_ms == 5.85);
  CHECK(profile.preprocessing.mean_ms == 8.88);
  CHECK(profile.inference.mean_ms == 21.90);
  CHECK(profile.solenoid.mean_ms == 21.53);
  CHECK(profile.mean_total_ms() == 58.16);
}

TEST_CASE("zero-variance latency sampling is exactly the sum of means") {
  const LatencyProfile profile = exact_latency();
  auto rng = RngStream::from_seed(1);
  for (int i = 0; i < 100; ++i) CHECK(sample_total_latency(profile, rng) == 58.16);
}

TEST_CASE("zeroed latency profile samples zero") {
  LatencyProfile profile;
  profile.acquisition = {0.0, 0.0};
  profile.preprocessing = {0.0, 0.0};
  profile.inference = {0.0, 0.0};
  profile.solenoid = {0.0, 0.0};
  auto rng = RngStream::from_seed(2);
  CHECK(sample_total_latency(profile, rng) == 0.0);
}

TEST_CASE("latency samples match the stage moments") {
  const LatencyProfile profile;  // means 5.85/8.88/21.90/21.53, sds 0.75/0.05/5.53/1.70
  auto rng = RngStream::from_seed(3);
  const int n = 100000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = sample_total_latency(profile, rng);
    CHECK(x >= 0.0);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sumsq / n - mean * mean);
  CHECK(std::abs(mean - 58.16) < 0.1);
  // Independent stages: total sd = sqrt(0.75^2 + 0.05^2 + 5.53^2 + 1.70^2) = 5.83.
  CHECK(std::abs(sd - 5.83) < 0.583);
}

TEST_CASE("latency profile validation") {
  LatencyProfile profile;
  CHECK_NOTHROW(profile.validate());
  profile.inference.mean_ms = -1.0;
  CHECK_THROWS_AS(profile.validate(), DomainError);
  profile = LatencyProfile{};
  profile.solenoid.sd_ms = -0.1;
  CHECK_THROWS_AS(profile.validate(), DomainError);
}

TEST_CASE("a single detection opens one lead-corrected spray interval") {
  NozzleState nozzle;
  nozzle.nozzle_id = 0;
  nozzle.flow_rate_lps = 0.0355556;
  VehicleState vehicle{10.0, kSpeedMps, 0};
  std::vector<SprayEvent> events;

  schedule_spray(1000.0, 10.0, vehicle, 58.16, 450.0, nozzle, events);
  REQUIRE(events.size() == 1);
  const SprayEvent& e = events[0];
  CHECK(e.start_ms == doctest::Approx(1058.16));
  // The nozzle opens 129.2 mm past the detection point and wets about 1 m.
  CHECK(e.start_position_m - 10.0 == doctest::Approx(0.1292444).epsilon(1e-6));
  const double end_m = spray_interval_end_m(e, kSpeedKmh);
  CHECK(end_m - 10.0 == doctest::Approx(1.1292444).epsilon(1e-6));
  CHECK(e.duration_ms == 450.0);
  CHECK(e.volume_l == doctest::Approx(0.0355556 * 0.45));
}

TEST_CASE("a retrigger while scheduled on extends the same event") {
  NozzleState nozzle;
  nozzle.nozzle_id = 3;
  nozzle.flow_rate_lps = 0.04;
  VehicleState vehicle{0.0, kSpeedMps, 0};
  std::vector<SprayEvent> events;

  schedule_spray(0.0, 0.0, vehicle, 58.16, 450.0, nozzle, events);
  vehicle.along_m = kSpeedMps * 0.1;
  schedule_spray(100.0, vehicle.along_m, vehicle, 58.16, 450.0, nozzle, events);

  REQUIRE(events.size() == 1);
  CHECK(events[0].duration_ms == doctest::Approx(550.0));
  CHECK(events[0].volume_l == doctest::Approx(0.04 * 0.55));
}

TEST_CASE("detections after the off-time open a fresh event") {
  NozzleState nozzle;
  nozzle.nozzle_id = 0;
  nozzle.flow_rate_lps = 0.04;
  VehicleState vehicle{0.0, kSpeedMps, 0};
  std::vector<SprayEvent> events;

  schedule_spray(0.0, 0.0, vehicle, 58.16, 450.0, nozzle, events);
  schedule_spray(600.0, kSpeedMps * 0.6, vehicle, 58.16, 450.0, nozzle, events);
  REQUIRE(events.size() == 2);
  CHECK(events[0].duration_ms == 450.0);
  CHECK(events[1].duration_ms == 450.0);
}

TEST_CASE("out-of-order detections violate the protocol") {
  NozzleState nozzle;
  nozzle.nozzle_id = 0;
  nozzle.flow_rate_lps = 0.04;
  VehicleState vehicle{0.0, kSpeedMps, 0};
  std::vector<SprayEvent> events;
  schedule_spray(100.0, 0.0, vehicle, 58.16, 450.0, nozzle, events);
  CHECK_THROWS_AS(schedule_spray(50.0, 0.0, vehicle, 58.16, 450.0, nozzle, events),
                  ProtocolError);
}

TEST_CASE("no detections means no events") {
  const StripGeometry strip = one_lane_strip(40.0);
  const std::vector<WeedInstance> empty_field;
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  const PassLog log = simulate_pass(empty_field, strip, Treatment::spot, camera, grid,
                                    perfect_profile(), exact_latency(), kSpeedKmh, 450.0, 0.0355556,
                                    12345);
  CHECK(log.spray_events.empty());
  CHECK(log.images_with_detection == 0);
  CHECK(log.images_total > 0);
}

TEST_CASE("blanket pass holds one event per nozzle across the strip") {
  StripGeometry strip = one_lane_strip(60.0);
  strip.rows = 3;
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  const std::vector<WeedInstance> field;
  const PassLog log = simulate_pass(field, strip, Treatment::blanket, camera, grid,
                                    perfect_profile(), exact_latency(), kSpeedKmh, 450.0, 0.0355556,
                                    7);
  REQUIRE(log.spray_events.size() == 6);  // 3 lanes x 2 nozzles
  std::vector<bool> seen(6, false);
  for (const SprayEvent& e : log.spray_events) {
    REQUIRE(e.nozzle_id >= 0);
    REQUIRE(e.nozzle_id < 6);
    seen[static_cast<std::size_t>(e.nozzle_id)] = true;
    CHECK(e.start_position_m == 0.0);
    CHECK(spray_interval_end_m(e, kSpeedKmh) == doctest::Approx(60.0).epsilon(1e-9));
    CHECK(e.volume_l == doctest::Approx(e.duration_ms / 1000.0 * 0.0355556));
  }
  for (bool s : seen) CHECK(s);
}

TEST_CASE("perfect spot pass covers every weed") {
  StripGeometry strip = one_lane_strip(60.0);
  strip.rows = 2;
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);

  FieldSpec spec;
  spec.seed = 314;
  spec.target_density = 0.3;
  const TrialLayout layout = layout_trial(2, 2, 1.6, 60.0, Treatment::spot);
  RowLayout rows;
  rows.row_width_m = 1.6;
  rows.rows_per_strip = 2;
  rows.strip_length_m = 60.0;
  const auto field = generate_field(spec, layout, rows);
  REQUIRE(field.size() > 20);

  const PassLog log = simulate_pass(field, strip, Treatment::spot, camera, grid, perfect_profile(),
                                    exact_latency(), kSpeedKmh, 450.0, 0.0355556, 2718);
  const CoverageResult coverage = coverage_hits(field, log, grid);
  // Strip 0 occupies cross [0, 3.2); roughly half the field lies inside it.
  CHECK(coverage.missed.empty());
  CHECK_FALSE(coverage.sprayed.empty());
}

TEST_CASE("spot pass over an empty field with zero false positives stays dry") {
  StripGeometry strip = one_lane_strip(80.0);
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  std::vector<WeedInstance> field;  // weeds exist, but outside this strip
  field.push_back(weed_at(0, 10.0, 5.0));
  const PassLog log = simulate_pass(field, strip, Treatment::spot, camera, grid, perfect_profile(),
                                    exact_latency(), kSpeedKmh, 450.0, 0.0355556, 5);
  CHECK(log.spray_events.empty());
}

TEST_CASE("with zero-variance latency every event start is lead-shifted onto a frame centre") {
  StripGeometry strip = one_lane_strip(60.0);
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  std::vector<WeedInstance> field;
  for (int k = 0; k < 12; ++k) field.push_back(weed_at(k, 2.5 + 4.7 * k, 0.4));

  const PassLog log = simulate_pass(field, strip, Treatment::spot, camera, grid, perfect_profile(),
                                    exact_latency(), kSpeedKmh, 450.0, 0.0355556, 99);
  REQUIRE_FALSE(log.spray_events.empty());
  const double lead_m = displacement_during(kSpeedKmh, 58.16) / 1000.0;
  const double step_m = displacement_during(kSpeedKmh, camera.frame_period_ms) / 1000.0;
  for (const SprayEvent& e : log.spray_events) {
    const double frames = (e.start_position_m - lead_m + 0.4) / step_m;
    CHECK(std::abs(frames - std::round(frames)) < 1e-6);
  }
}

TEST_CASE("merged spray intervals never overlap per nozzle") {
  StripGeometry strip = one_lane_strip(120.0);
  strip.rows = 2;
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  FieldSpec spec;
  spec.seed = 11;
  spec.target_density = 0.4;
  const TrialLayout layout = layout_trial(2, 2, 1.6, 120.0, Treatment::spot);
  RowLayout rows{1.6, 2, 120.0};
  const auto field = generate_field(spec, layout, rows);

  DetectorProfile noisy = perfect_profile();
  noisy.false_positive_rate = 0.05;
  const PassLog log = simulate_pass(field, strip, Treatment::spot, camera, grid, noisy,
                                    LatencyProfile{}, kSpeedKmh, 450.0, 0.0355556, 4242);

  REQUIRE_FALSE(log.spray_events.empty());
  std::map<int, std::vector<std::pair<double, double>>> by_nozzle;
  for (const SprayEvent& e : log.spray_events) {
    by_nozzle[e.nozzle_id].push_back({e.start_ms, e.start_ms + e.duration_ms});
  }
  double total_on_ms = 0.0;
  for (auto& [nozzle, spans] : by_nozzle) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) {
      CHECK(spans[i].first >= spans[i - 1].second - 1e-9);
    }
    double nozzle_on = 0.0;
    for (const auto& [on, off] : spans) nozzle_on += off - on;
    total_on_ms = std::max(total_on_ms, nozzle_on);
  }
  // No nozzle can stay on longer than the pass plus latency and the trailing
  // section (with headroom for the random latency draws).
  const double pass_ms = (strip.length_m + camera.along_footprint_m) / kSpeedMps * 1000.0;
  CHECK(total_on_ms <= pass_ms + 700.0);
}

TEST_CASE("events are sorted by start time") {
  StripGeometry strip = one_lane_strip(100.0);
  strip.rows = 3;
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  FieldSpec spec;
  spec.seed = 17;
  spec.target_density = 0.2;
  const TrialLayout layout = layout_trial(2, 3, 1.6, 100.0, Treatment::spot);
  RowLayout rows{1.6, 3, 100.0};
  const auto field = generate_field(spec, layout, rows);
  const PassLog log = simulate_pass(field, strip, Treatment::spot, camera, grid, perfect_profile(),
                                    LatencyProfile{}, kSpeedKmh, 450.0, 0.0355556, 33);
  for (std::size_t i = 1; i < log.spray_events.size(); ++i) {
    CHECK(log.spray_events[i].start_ms >= log.spray_events[i - 1].start_ms);
  }
}

TEST_CASE("simulated passes are deterministic in the seed") {
  StripGeometry strip = one_lane_strip(60.0);
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  FieldSpec spec;
  spec.seed = 23;
  spec.target_density = 0.25;
  const TrialLayout layout = layout_trial(2, 1, 1.6, 60.0, Treatment::spot);
  RowLayout rows{1.6, 1, 60.0};
  const auto field = generate_field(spec, layout, rows);

  const auto run = [&] {
    return simulate_pass(field, strip, Treatment::spot, camera, grid, DetectorProfile{},
                         LatencyProfile{}, kSpeedKmh, 450.0, 0.0355556, 321);
  };
  const PassLog a = run();
  const PassLog b = run();
  REQUIRE(a.spray_events.size() == b.spray_events.size());
  for (std::size_t i = 0; i < a.spray_events.size(); ++i) {
    CHECK(a.spray_events[i].start_ms == b.spray_events[i].start_ms);
    CHECK(a.spray_events[i].start_position_m == b.spray_events[i].start_position_m);
    CHECK(a.spray_events[i].duration_ms == b.spray_events[i].duration_ms);
    CHECK(a.spray_events[i].volume_l == b.spray_events[i].volume_l);
  }
  REQUIRE(a.detections.size() == b.detections.size());
  CHECK(a.images_with_detection == b.images_with_detection);
}

TEST_CASE("blanket pass calibrated at 200 L/ha") {
  StripGeometry strip = one_lane_strip(100.0);
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  const std::vector<WeedInstance> field;
  const PassLog log = simulate_pass(field, strip, Treatment::blanket, camera, grid,
                                    DetectorProfile{}, LatencyProfile{}, kSpeedKmh, 450.0, 0.03556,
                                    1);
  const double usage = usage_l_per_ha(log, strip.area_ha());
  CHECK(usage == doctest::Approx(200.0).epsilon(0.001));
}

TEST_CASE("usage accounting basics") {
  PassLog log;
  log.strip = one_lane_strip(10.0);
  CHECK(usage_l_per_ha(log, 1.0) == 0.0);
  SprayEvent e;
  e.volume_l = 3.0;
  log.spray_events.push_back(e);
  log.spray_events.push_back(e);
  CHECK(usage_l_per_ha(log, 2.0) == doctest::Approx(3.0));
  CHECK_THROWS_AS((void)usage_l_per_ha(log, 0.0), DomainError);
}

TEST_CASE("usage tracks the sprayed-distance fraction") {
  // Isolated weeds 5 m apart in both tiles: each wets ~1.8 m of its lane
  // (0.8 m view window + 1 m section), about 35% of the strip.
  StripGeometry strip = one_lane_strip(180.0);
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  std::vector<WeedInstance> field;
  std::int64_t id = 0;
  for (int k = 0; k < 35; ++k) {
    field.push_back(weed_at(id++, 2.5 + 5.0 * k, 0.4));  // tile 0 centre
    field.push_back(weed_at(id++, 2.5 + 5.0 * k, 1.2));  // tile 1 centre
  }
  const double flow = 0.0355556;
  const PassLog spot = simulate_pass(field, strip, Treatment::spot, camera, grid, perfect_profile(),
                                     exact_latency(), kSpeedKmh, 450.0, flow, 55);
  const PassLog blanket = simulate_pass(field, strip, Treatment::blanket, camera, grid,
                                        perfect_profile(), exact_latency(), kSpeedKmh, 450.0, flow,
                                        55);
  const double usage_ratio =
      usage_l_per_ha(spot, strip.area_ha()) / usage_l_per_ha(blanket, strip.area_ha());

  double sprayed_m = 0.0;
  for (const SprayEvent& e : spot.spray_events) {
    sprayed_m += spray_interval_end_m(e, kSpeedKmh) - e.start_position_m;
  }
  const double distance_fraction = sprayed_m / (2.0 * strip.length_m);
  // Usage is proportional to sprayed distance...
  CHECK(usage_ratio == doctest::Approx(distance_fraction).epsilon(1e-9));
  // ...and this field sprays about 35% of it.
  CHECK(std::abs(usage_ratio - 0.35) < 0.02);
}

TEST_CASE("spot usage grows with false-positive rate and with weed density") {
  StripGeometry strip = one_lane_strip(80.0);
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  const TrialLayout layout = layout_trial(2, 1, 1.6, 80.0, Treatment::spot);
  RowLayout rows{1.6, 1, 80.0};

  const auto mean_usage = [&](double fpr, double density) {
    DetectorProfile profile;
    profile.true_positive_rate = {0.95, 0.95, 0.95};
    profile.false_positive_rate = fpr;
    double total = 0.0;
    const int n_seeds = 5;
    for (int seed = 0; seed < n_seeds; ++seed) {
      FieldSpec spec;
      spec.seed = static_cast<std::uint64_t>(seed + 60);
      spec.target_density = density;
      const auto field = generate_field(spec, layout, rows);
      const PassLog log = simulate_pass(field, strip, Treatment::spot, camera, grid, profile,
                                        LatencyProfile{}, kSpeedKmh, 450.0, 0.0355556,
                                        static_cast<std::uint64_t>(seed + 1000));
      total += usage_l_per_ha(log, strip.area_ha());
    }
    return total / n_seeds;
  };

  const double low_fpr = mean_usage(0.0, 0.05);
  const double mid_fpr = mean_usage(0.02, 0.05);
  const double high_fpr = mean_usage(0.10, 0.05);
  CHECK(low_fpr < mid_fpr);
  CHECK(mid_fpr < high_fpr);

  const double sparse = mean_usage(0.0, 0.05);
  const double dense = mean_usage(0.0, 0.35);
  CHECK(sparse < dense);
}

TEST_CASE("blanket usage is invariant to the detector profile") {
  StripGeometry strip = one_lane_strip(60.0);
  strip.rows = 2;
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  FieldSpec spec;
  spec.seed = 77;
  spec.target_density = 0.2;
  const TrialLayout layout = layout_trial(2, 2, 1.6, 60.0, Treatment::spot);
  RowLayout rows{1.6, 2, 60.0};
  const auto field = generate_field(spec, layout, rows);

  DetectorProfile degraded;
  degraded.true_positive_rate = {0.3, 0.5, 0.7};
  degraded.false_positive_rate = 0.2;
  degraded.degradation_event_probability = 0.5;
  degraded.degradation_tpr_multiplier = 0.1;

  const PassLog a = simulate_pass(field, strip, Treatment::blanket, camera, grid,
                                  DetectorProfile{}, LatencyProfile{}, kSpeedKmh, 450.0, 0.0355556,
                                  5150);
  const PassLog b = simulate_pass(field, strip, Treatment::blanket, camera, grid, degraded,
                                  LatencyProfile{}, kSpeedKmh, 450.0, 0.0355556, 5150);
  CHECK(usage_l_per_ha(a, strip.area_ha()) == usage_l_per_ha(b, strip.area_ha()));
}

TEST_CASE("coverage splits weeds by spray-interval containment") {
  PassLog log;
  log.strip = one_lane_strip(10.0);
  log.treatment = Treatment::spot;
  log.speed_kmh = kSpeedKmh;
  SprayEvent e;
  e.nozzle_id = 0;  // tile 0 of the single lane
  e.start_position_m = 0.1292444;
  e.start_ms = 58.16;
  e.duration_ms = 450.0;
  e.volume_l = 0.016;
  log.spray_events.push_back(e);

  std::vector<WeedInstance> field;
  field.push_back(weed_at(1, 0.5, 0.4));       // inside [0.129, 1.129]
  field.push_back(weed_at(2, 3.129, 0.4));     // 2 m past the interval end
  field.push_back(weed_at(3, 0.5, 1.2));       // other tile, no events there
  field.push_back(weed_at(4, 0.5, 7.7));       // outside the strip entirely

  const TileGrid grid = TileGrid::centered(1.6);
  const CoverageResult coverage = coverage_hits(field, log, grid);
  CHECK(coverage.sprayed == std::vector<std::int64_t>{1});
  CHECK(coverage.missed == std::vector<std::int64_t>{2, 3});
}

TEST_CASE("blanket coverage sprays every weed in the strip") {
  StripGeometry strip = one_lane_strip(50.0);
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  std::vector<WeedInstance> field;
  for (int k = 0; k < 20; ++k) field.push_back(weed_at(k, 0.01 + 2.49 * k, 0.1 + 0.07 * k));
  const PassLog log = simulate_pass(field, strip, Treatment::blanket, camera, grid,
                                    DetectorProfile{}, LatencyProfile{}, kSpeedKmh, 450.0,
                                    0.0355556, 8);
  const CoverageResult coverage = coverage_hits(field, log, grid);
  CHECK(coverage.missed.empty());
  CHECK(coverage.sprayed.size() == field.size());
}

TEST_CASE("strip geometry helpers") {
  StripGeometry strip;
  strip.cross_offset_m = 20.8;
  strip.rows = 13;
  strip.row_width_m = 1.6;
  strip.length_m = 601.0;
  CHECK(strip.width_m() == doctest::Approx(20.8));
  CHECK(strip.area_ha() == doctest::Approx(1.25008));
  CHECK(strip.contains_cross(20.8));
  CHECK(strip.contains_cross(41.59));
  CHECK_FALSE(strip.contains_cross(41.6));
  CHECK_FALSE(strip.contains_cross(20.79));
  CHECK(strip.lane_of(20.9) == 0);
  CHECK(strip.lane_of(22.5) == 1);
  CHECK(strip.lane_centre_cross_m(0) == doctest::Approx(21.6));
  CHECK_THROWS_AS((void)strip.lane_centre_cross_m(13), DomainError);
  strip.rows = 0;
  CHECK_THROWS_AS(strip.validate(), DomainError);
}
