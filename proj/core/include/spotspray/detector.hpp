#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spotspray/fieldgen.hpp"
#include "spotspray/rng.hpp"

namespace spotspray {

// Stochastic stand-in for the trained per-tile classifier, described purely
// by its confusion-matrix rates. The default rates are placeholders for a
// plausible model, not measured values.
struct DetectorProfile {
  std::array<double, kSpeciesCount> true_positive_rate = {0.95, 0.95, 0.95};
  double false_positive_rate = 0.02;  // per tile-view, per class
  // Shadow-style under-exposure: each frame independently degrades with
  // event_probability, multiplying every TPR by tpr_multiplier for that frame.
  double degradation_event_probability = 0.0;
  double degradation_tpr_multiplier = 1.0;

  void validate() const;
};

struct DetectionRecord {
  std::int64_t frame_id = 0;
  int tile_id = 0;  // global across the pass: row_index * tiles_per_camera + tile
  double t_ms = 0.0;
  std::array<bool, kSpeciesCount> predicted = {false, false, false};
  std::vector<std::int64_t> truth_weed_ids;

  bool any_predicted() const;
};

// One stochastic classification of one tile view. For each class
// independently: occupied tiles fire with probability TPR (times the
// degradation multiplier when `degraded`), unoccupied tiles fire with
// probability FPR. Consumes exactly kSpeciesCount draws.
std::array<bool, kSpeciesCount> classify_tile(const std::array<bool, kSpeciesCount>& truth_occupied,
                                              const DetectorProfile& profile, bool degraded,
                                              RngStream& rng);

// Number of frames in which one ground point stays inside the camera
// footprint: floor(footprint / per-frame displacement), clamped to at least
// one view. Throws DomainError on non-positive inputs.
int views_per_weed(double speed_kmh, double frame_period_ms, double along_footprint_m);

// Probability that at least one of `views` independent looks fires, given a
// per-view probability: 1 - (1-p)^views.
double compound_detection_probability(double p_per_view, int views);

}  // namespace spotspray
