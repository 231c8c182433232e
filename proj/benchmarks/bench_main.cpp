// Microbenchmarks for the hot paths: field generation, one simulated strip
// pass, per-tile classification, the t statistics, and runoff integration.

#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "spotspray/analysis.hpp"
#include "spotspray/controller.hpp"
#include "spotspray/detector.hpp"
#include "spotspray/fieldgen.hpp"
#include "spotspray/geometry.hpp"
#include "spotspray/rng.hpp"
#include "spotspray/waterq.hpp"

namespace {

using namespace spotspray;

FieldSpec field_spec(double density, std::uint64_t seed) {
  FieldSpec spec;
  spec.seed = seed;
  spec.target_density = density;
  return spec;
}

RowLayout rows_of(int rows, double length_m) {
  RowLayout layout;
  layout.row_width_m = 1.6;
  layout.rows_per_strip = rows;
  layout.strip_length_m = length_m;
  return layout;
}

StripGeometry strip_of(int rows, double length_m) {
  StripGeometry strip;
  strip.cross_offset_m = 0.0;
  strip.rows = rows;
  strip.row_width_m = 1.6;
  strip.length_m = length_m;
  return strip;
}

void BM_generate_field(benchmark::State& state) {
  const double density = static_cast<double>(state.range(0)) / 100.0;
  const RowLayout rows = rows_of(13, 601.0);
  const TrialLayout layout = layout_trial(6, 13, 1.6, 601.0, Treatment::blanket);
  const FieldSpec spec = field_spec(density, 42);
  std::size_t weeds = 0;
  for (auto _ : state) {
    const std::vector<WeedInstance> field = generate_field(spec, layout, rows);
    weeds = field.size();
    benchmark::DoNotOptimize(field.data());
  }
  state.counters["weeds"] = static_cast<double>(weeds);
}
BENCHMARK(BM_generate_field)->Arg(5)->Arg(30)->Arg(60);

void BM_simulate_pass(benchmark::State& state) {
  const bool spot = state.range(0) != 0;
  const int rows = 13;
  const double length_m = 601.0;
  const RowLayout row_layout = rows_of(rows, length_m);
  const TrialLayout layout = layout_trial(2, rows, 1.6, length_m, Treatment::blanket);
  const std::vector<WeedInstance> field =
      generate_field(field_spec(0.3, 7), layout, row_layout);
  const StripGeometry strip = strip_of(rows, length_m);
  const CameraConfig camera;
  const TileGrid grid = TileGrid::centered(1.6);
  const DetectorProfile detector;
  const LatencyProfile latency;
  const double flow = 200.0 * 0.8 * (8.0 / 3.6) / 1e4;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const PassLog log =
        simulate_pass(field, strip, spot ? Treatment::spot : Treatment::blanket, camera, grid,
                      detector, latency, 8.0, 450.0, flow, seed++);
    benchmark::DoNotOptimize(log.spray_events.data());
  }
  state.counters["weeds"] = static_cast<double>(field.size());
}
BENCHMARK(BM_simulate_pass)->Arg(0)->Arg(1);

void BM_classify_tile(benchmark::State& state) {
  const DetectorProfile profile;
  RngStream rng = RngStream::from_seed(99);
  const std::array<bool, kSpeciesCount> truth = {true, false, false};
  for (auto _ : state) {
    const auto predicted = classify_tile(truth, profile, false, rng);
    benchmark::DoNotOptimize(predicted);
  }
}
BENCHMARK(BM_classify_tile);

void BM_welch_t(benchmark::State& state) {
  RngStream rng = RngStream::from_seed(1234);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n);
  std::vector<double> b(n);
  for (double& x : a) x = rng.uniform(0.0, 100.0);
  for (double& x : b) x = rng.uniform(20.0, 120.0);
  for (auto _ : state) {
    const StatResult result = welch_t(a, b);
    benchmark::DoNotOptimize(result.p_value);
  }
}
BENCHMARK(BM_welch_t)->Arg(6)->Arg(100)->Arg(10000);

void BM_event_load(benchmark::State& state) {
  RngStream rng = RngStream::from_seed(5);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<RunoffSample> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i].t_min = static_cast<double>(i);
    samples[i].flow_lps = 5.0 + 2.0 * std::sin(0.1 * static_cast<double>(i));
    samples[i].conc_ugl = rng.uniform(10.0, 120.0);
  }
  SamplingPlan plan;
  plan.trigger_volume_l = 400.0;
  for (auto _ : state) {
    const double load = event_load(samples, 1.62);
    const double conc = composite_concentration(samples, plan);
    benchmark::DoNotOptimize(load);
    benchmark::DoNotOptimize(conc);
  }
}
BENCHMARK(BM_event_load)->Arg(60)->Arg(600);

}  // namespace

BENCHMARK_MAIN();
