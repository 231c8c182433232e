#include "spotspray/controller.hpp"

#include <algorithm>
#include <cmath>

#include "spotspray/units.hpp"

namespace spotspray {

void LatencyProfile::validate() const {
  for (const LatencyStage* stage : {&acquisition, &preprocessing, &inference, &solenoid}) {
    if (!(stage->mean_ms >= 0.0)) throw DomainError("latency: stage means must be >= 0");
    if (!(stage->sd_ms >= 0.0)) throw DomainError("latency: stage sds must be >= 0");
  }
}

double LatencyProfile::mean_total_ms() const {
  return acquisition.mean_ms + preprocessing.mean_ms + inference.mean_ms + solenoid.mean_ms;
}

void NozzleState::validate() const {
  if (!(flow_rate_lps > 0.0)) throw DomainError("nozzle: flow_rate_lps must be > 0");
  if (mode == Mode::on && !(scheduled_off_ms >= on_since_ms))
    throw DomainError("nozzle: scheduled_off must be >= on_since while on");
}

void StripGeometry::validate() const {
  if (rows < 1) throw DomainError("strip: rows must be >= 1");
  if (!(row_width_m > 0.0)) throw DomainError("strip: row_width_m must be > 0");
  if (!(length_m > 0.0)) throw DomainError("strip: length_m must be > 0");
  if (!std::isfinite(cross_offset_m)) throw DomainError("strip: cross_offset_m must be finite");
}

double StripGeometry::area_ha() const { return m2_to_ha(width_m() * length_m); }

bool StripGeometry::contains_cross(double cross_m) const {
  return cross_m >= cross_offset_m && cross_m < cross_offset_m + width_m();
}

int StripGeometry::lane_of(double cross_m) const {
  const int lane = static_cast<int>(std::floor((cross_m - cross_offset_m) / row_width_m));
  return std::clamp(lane, 0, rows - 1);
}

double StripGeometry::lane_centre_cross_m(int lane) const {
  if (lane < 0 || lane >= rows) throw DomainError("strip: lane out of range");
  return cross_offset_m + (lane + 0.5) * row_width_m;
}

double sample_total_latency(const LatencyProfile& profile, RngStream& rng) {
  profile.validate();
  double total_ms = 0.0;
  for (const LatencyStage* stage : {&profile.acquisition, &profile.preprocessing,
                                    &profile.inference, &profile.solenoid}) {
    total_ms += rng.truncated_normal_nonneg(stage->mean_ms, stage->sd_ms);
  }
  return total_ms;
}

namespace {

double event_volume_l(double flow_rate_lps, double duration_ms) {
  return flow_rate_lps * ms_to_s(duration_ms);
}

}  // namespace

void schedule_spray(double detection_time_ms, double detection_position_m,
                    const VehicleState& vehicle, double latency_ms, double spray_duration_ms,
                    NozzleState& nozzle, std::vector<SprayEvent>& events) {
  vehicle.validate();
  nozzle.validate();
  if (!(latency_ms >= 0.0)) throw DomainError("schedule_spray: latency_ms must be >= 0");
  if (!(spray_duration_ms > 0.0)) throw DomainError("schedule_spray: spray_duration_ms must be > 0");
  if (detection_time_ms < nozzle.last_command_ms)
    throw ProtocolError("schedule_spray: detections must arrive in time order");
  nozzle.last_command_ms = detection_time_ms;

  const double on_ms = detection_time_ms + latency_ms;
  const double off_ms = on_ms + spray_duration_ms;
  const bool active = nozzle.mode != NozzleState::Mode::off;

  if (active && on_ms <= nozzle.scheduled_off_ms) {
    // Retrigger while (scheduled) on: one merged burst, off-time only ever
    // extends.
    nozzle.scheduled_off_ms = std::max(nozzle.scheduled_off_ms, off_ms);
    SprayEvent& open = events.at(static_cast<std::size_t>(nozzle.open_event));
    open.duration_ms = nozzle.scheduled_off_ms - nozzle.on_since_ms;
    open.volume_l = event_volume_l(nozzle.flow_rate_lps, open.duration_ms);
    nozzle.mode = detection_time_ms >= nozzle.on_since_ms ? NozzleState::Mode::on
                                                          : NozzleState::Mode::commanded;
    return;
  }

  // Rising edge: the command is in flight until on_ms.
  nozzle.mode = NozzleState::Mode::commanded;
  nozzle.on_since_ms = on_ms;
  nozzle.scheduled_off_ms = off_ms;
  SprayEvent event;
  event.nozzle_id = nozzle.nozzle_id;
  event.start_position_m = detection_position_m + vehicle.speed_mps * ms_to_s(latency_ms);
  event.start_ms = on_ms;
  event.duration_ms = spray_duration_ms;
  event.volume_l = event_volume_l(nozzle.flow_rate_lps, spray_duration_ms);
  nozzle.open_event = static_cast<std::int64_t>(events.size());
  events.push_back(event);
}

double spray_interval_end_m(const SprayEvent& event, double speed_kmh) {
  return event.start_position_m + kmh_to_mps(speed_kmh) * ms_to_s(event.duration_ms);
}

namespace {

// Weeds of one lane bucketed per tile, sorted by along-track position.
struct TileWeeds {
  std::vector<const WeedInstance*> weeds;
  std::size_t lo = 0;  // sliding window over the sorted list
  std::size_t hi = 0;
};

constexpr std::uint64_t kDegradationStream = 0;
constexpr std::uint64_t kClassifyStream = 1;
constexpr std::uint64_t kLatencyStream = 2;
constexpr std::uint64_t kVisibilityStream = 3;

}  // namespace

PassLog simulate_pass(const std::vector<WeedInstance>& field, const StripGeometry& strip,
                      Treatment treatment, const CameraConfig& camera, const TileGrid& grid,
                      const DetectorProfile& detector, const LatencyProfile& latency,
                      double speed_kmh, double spray_duration_ms, double flow_rate_lps,
                      std::uint64_t seed) {
  strip.validate();
  camera.validate();
  grid.validate();
  detector.validate();
  latency.validate();
  if (grid.span_m() > camera.cross_footprint_m() + 1e-9)
    throw GeometryError("simulate_pass: tiles extend beyond the camera field of view");
  if (!(speed_kmh > 0.0)) throw DomainError("simulate_pass: speed_kmh must be > 0");
  if (!(spray_duration_ms > 0.0)) throw DomainError("simulate_pass: spray_duration_ms must be > 0");
  if (!(flow_rate_lps > 0.0)) throw DomainError("simulate_pass: flow_rate_lps must be > 0");

  const int tiles = grid.tile_count();
  const double speed_mps = kmh_to_mps(speed_kmh);
  const double dt_ms = camera.frame_period_ms;
  const double step_m = speed_mps * ms_to_s(dt_ms);
  const double half_along_m = camera.along_footprint_m / 2.0;
  // Frame 0 centres the footprint just before the strip entrance; the last
  // frame is past the exit, so every weed gets its full window of views.
  const std::int64_t n_frames =
      static_cast<std::int64_t>(std::ceil((strip.length_m + camera.along_footprint_m) / step_m)) + 1;

  PassLog log;
  log.distance_m = strip.length_m;
  log.treatment = treatment;
  log.speed_kmh = speed_kmh;
  log.strip = strip;
  log.images_total = static_cast<std::int64_t>(strip.rows) * n_frames;
  log.detections.reserve(static_cast<std::size_t>(log.images_total) * tiles);

  const RngStream pass_rng = RngStream::from_seed(seed);

  for (int lane = 0; lane < strip.rows; ++lane) {
    const double lane_centre_m = strip.lane_centre_cross_m(lane);

    std::vector<TileWeeds> buckets(static_cast<std::size_t>(tiles));
    for (const WeedInstance& weed : field) {
      if (!strip.contains_cross(weed.cross_m)) continue;
      if (strip.lane_of(weed.cross_m) != lane) continue;
      const int tile = grid.nearest_tile(weed.cross_m - lane_centre_m);
      buckets[static_cast<std::size_t>(tile)].weeds.push_back(&weed);
    }
    for (TileWeeds& bucket : buckets) {
      std::sort(bucket.weeds.begin(), bucket.weeds.end(),
                [](const WeedInstance* a, const WeedInstance* b) {
                  return a->along_m != b->along_m ? a->along_m < b->along_m : a->id < b->id;
                });
    }

    RngStream lane_rng = pass_rng.substream(static_cast<std::uint64_t>(lane));
    RngStream degradation_rng = lane_rng.substream(kDegradationStream);
    RngStream classify_rng = lane_rng.substream(kClassifyStream);
    RngStream latency_rng = lane_rng.substream(kLatencyStream);
    RngStream visibility_rng = lane_rng.substream(kVisibilityStream);

    std::vector<NozzleState> nozzles(static_cast<std::size_t>(tiles));
    for (int tile = 0; tile < tiles; ++tile) {
      nozzles[static_cast<std::size_t>(tile)].nozzle_id =
          lane * tiles + grid.nozzle_of_tile[static_cast<std::size_t>(tile)];
      nozzles[static_cast<std::size_t>(tile)].flow_rate_lps = flow_rate_lps;
    }

    if (treatment == Treatment::blanket) {
      // Every nozzle held open across the whole strip.
      for (int tile = 0; tile < tiles; ++tile) {
        SprayEvent event;
        event.nozzle_id = nozzles[static_cast<std::size_t>(tile)].nozzle_id;
        event.start_position_m = 0.0;
        event.start_ms = s_to_ms(half_along_m / speed_mps);  // vehicle reaches the entrance
        event.duration_ms = s_to_ms(strip.length_m / speed_mps);
        event.volume_l = event_volume_l(flow_rate_lps, event.duration_ms);
        log.spray_events.push_back(event);
      }
    }

    for (std::int64_t frame = 0; frame < n_frames; ++frame) {
      const double t_ms = static_cast<double>(frame) * dt_ms;
      const double centre_m = -half_along_m + static_cast<double>(frame) * step_m;
      const bool degraded = degradation_rng.bernoulli(detector.degradation_event_probability);
      bool any_detected = false;

      for (int tile = 0; tile < tiles; ++tile) {
        TileWeeds& bucket = buckets[static_cast<std::size_t>(tile)];
        while (bucket.lo < bucket.weeds.size() &&
               bucket.weeds[bucket.lo]->along_m < centre_m - half_along_m) {
          bucket.lo += 1;
        }
        if (bucket.hi < bucket.lo) bucket.hi = bucket.lo;
        while (bucket.hi < bucket.weeds.size() &&
               bucket.weeds[bucket.hi]->along_m <= centre_m + half_along_m) {
          bucket.hi += 1;
        }

        DetectionRecord record;
        record.frame_id = frame;
        record.tile_id = lane * tiles + tile;
        record.t_ms = t_ms;
        std::array<bool, kSpeciesCount> truth{};
        for (std::size_t k = bucket.lo; k < bucket.hi; ++k) {
          const WeedInstance& weed = *bucket.weeds[k];
          record.truth_weed_ids.push_back(weed.id);
          const bool visible =
              weed.detectability >= 1.0 || visibility_rng.bernoulli(weed.detectability);
          if (visible) truth[static_cast<std::size_t>(weed.species)] = true;
        }
        record.predicted = classify_tile(truth, detector, degraded, classify_rng);
        const bool fired = record.any_predicted();
        any_detected = any_detected || fired;

        if (fired && treatment == Treatment::spot) {
          const double latency_ms = sample_total_latency(latency, latency_rng);
          VehicleState vehicle{centre_m, speed_mps, lane};
          schedule_spray(t_ms, centre_m, vehicle, latency_ms, spray_duration_ms,
                         nozzles[static_cast<std::size_t>(tile)], log.spray_events);
        }
        log.detections.push_back(std::move(record));
      }
      if (any_detected) log.images_with_detection += 1;
    }
  }

  std::stable_sort(log.spray_events.begin(), log.spray_events.end(),
                   [](const SprayEvent& a, const SprayEvent& b) {
                     return a.start_ms != b.start_ms ? a.start_ms < b.start_ms
                                                     : a.nozzle_id < b.nozzle_id;
                   });
  return log;
}

double usage_l_per_ha(const PassLog& log, double area_ha) {
  if (!(area_ha > 0.0)) throw DomainError("usage_l_per_ha: area_ha must be > 0");
  double volume_l = 0.0;
  for (const SprayEvent& event : log.spray_events) volume_l += event.volume_l;
  return volume_l / area_ha;
}

CoverageResult coverage_hits(const std::vector<WeedInstance>& field, const PassLog& log,
                             const TileGrid& grid) {
  grid.validate();
  log.strip.validate();
  const int tiles = grid.tile_count();

  // Per-nozzle ground intervals, sorted by start; merged events never
  // overlap, so a binary search on starts suffices.
  struct Interval {
    double begin_m;
    double end_m;
  };
  std::vector<std::vector<Interval>> by_nozzle(
      static_cast<std::size_t>(log.strip.rows) * static_cast<std::size_t>(tiles));
  for (const SprayEvent& event : log.spray_events) {
    if (event.nozzle_id < 0 || event.nozzle_id >= static_cast<int>(by_nozzle.size()))
      throw DomainError("coverage_hits: event nozzle outside the strip's nozzle range");
    by_nozzle[static_cast<std::size_t>(event.nozzle_id)].push_back(
        Interval{event.start_position_m, spray_interval_end_m(event, log.speed_kmh)});
  }
  for (auto& intervals : by_nozzle) {
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.begin_m < b.begin_m; });
  }

  CoverageResult result;
  for (const WeedInstance& weed : field) {
    if (!log.strip.contains_cross(weed.cross_m)) continue;
    const int lane = log.strip.lane_of(weed.cross_m);
    const int tile = grid.nearest_tile(weed.cross_m - log.strip.lane_centre_cross_m(lane));
    const int nozzle = lane * tiles + grid.nozzle_of_tile[static_cast<std::size_t>(tile)];
    const auto& intervals = by_nozzle[static_cast<std::size_t>(nozzle)];

    auto it = std::upper_bound(intervals.begin(), intervals.end(), weed.along_m,
                               [](double pos, const Interval& iv) { return pos < iv.begin_m; });
    bool covered = false;
    if (it != intervals.begin()) {
      --it;
      covered = weed.along_m >= it->begin_m && weed.along_m <= it->end_m;
    }
    (covered ? result.sprayed : result.missed).push_back(weed.id);
  }
  std::sort(result.sprayed.begin(), result.sprayed.end());
  std::sort(result.missed.begin(), result.missed.end());
  return result;
}

}  // namespace spotspray
