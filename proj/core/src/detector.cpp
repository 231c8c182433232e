#include "spotspray/detector.hpp"

#include <cmath>

#include "spotspray/geometry.hpp"
#include "spotspray/units.hpp"

namespace spotspray {

void DetectorProfile::validate() const {
  for (double tpr : true_positive_rate)
    if (!(tpr >= 0.0 && tpr <= 1.0))
      throw DomainError("detector: true_positive_rate must be in [0, 1]");
  if (!(false_positive_rate >= 0.0 && false_positive_rate <= 1.0))
    throw DomainError("detector: false_positive_rate must be in [0, 1]");
  if (!(degradation_event_probability >= 0.0 && degradation_event_probability <= 1.0))
    throw DomainError("detector: degradation_event_probability must be in [0, 1]");
  if (!(degradation_tpr_multiplier >= 0.0 && degradation_tpr_multiplier <= 1.0))
    throw DomainError("detector: degradation_tpr_multiplier must be in [0, 1]");
}

bool DetectionRecord::any_predicted() const {
  for (bool p : predicted)
    if (p) return true;
  return false;
}

std::array<bool, kSpeciesCount> classify_tile(const std::array<bool, kSpeciesCount>& truth_occupied,
                                              const DetectorProfile& profile, bool degraded,
                                              RngStream& rng) {
  profile.validate();
  std::array<bool, kSpeciesCount> predicted{};
  const double multiplier = degraded ? profile.degradation_tpr_multiplier : 1.0;
  for (int c = 0; c < kSpeciesCount; ++c) {
    const double p =
        truth_occupied[c] ? profile.true_positive_rate[c] * multiplier : profile.false_positive_rate;
    predicted[c] = rng.bernoulli(p);
  }
  return predicted;
}

int views_per_weed(double speed_kmh, double frame_period_ms, double along_footprint_m) {
  if (!(speed_kmh > 0.0)) throw DomainError("views_per_weed: speed_kmh must be > 0");
  if (!(frame_period_ms > 0.0)) throw DomainError("views_per_weed: frame_period_ms must be > 0");
  if (!(along_footprint_m > 0.0)) throw DomainError("views_per_weed: along_footprint_m must be > 0");
  const double step_m = mm_to_m(displacement_during(speed_kmh, frame_period_ms));
  const int views = static_cast<int>(std::floor(along_footprint_m / step_m));
  return views < 1 ? 1 : views;
}

double compound_detection_probability(double p_per_view, int views) {
  if (!(p_per_view >= 0.0 && p_per_view <= 1.0))
    throw DomainError("compound_detection_probability: p must be in [0, 1]");
  if (views < 0) throw DomainError("compound_detection_probability: views must be >= 0");
  return 1.0 - std::pow(1.0 - p_per_view, static_cast<double>(views));
}

}  // namespace spotspray
