#include "spotspray/waterq.hpp"

#include <cmath>

#include "spotspray/units.hpp"

namespace spotspray {

namespace {

void validate_series(const std::vector<RunoffSample>& samples, bool need_concentrations) {
  if (samples.size() < 2) throw DomainError("runoff: need at least 2 samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const RunoffSample& s = samples[i];
    if (!(s.t_min >= 0.0)) throw DomainError("runoff: sample times must be >= 0");
    if (!(s.flow_lps >= 0.0)) throw DomainError("runoff: flow must be >= 0");
    if (i > 0 && s.t_min < samples[i - 1].t_min)
      throw DomainError("runoff: sample times must be non-decreasing");
    if (need_concentrations && !s.conc_ugl.has_value())
      throw DomainError("runoff: sample is missing a concentration");
    if (s.conc_ugl.has_value() && !(*s.conc_ugl >= 0.0))
      throw DomainError("runoff: concentrations must be >= 0");
  }
}

// Cumulative flow volume (litres) at each sample time, trapezoidal.
std::vector<double> cumulative_volume_l(const std::vector<RunoffSample>& samples) {
  std::vector<double> volume(samples.size(), 0.0);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dt_s = min_to_s(samples[i].t_min - samples[i - 1].t_min);
    volume[i] = volume[i - 1] + 0.5 * (samples[i].flow_lps + samples[i - 1].flow_lps) * dt_s;
  }
  return volume;
}

double interpolate_concentration(const std::vector<RunoffSample>& samples, double t_min) {
  if (t_min <= samples.front().t_min) return *samples.front().conc_ugl;
  if (t_min >= samples.back().t_min) return *samples.back().conc_ugl;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (t_min <= samples[i].t_min) {
      const double span = samples[i].t_min - samples[i - 1].t_min;
      if (span == 0.0) return *samples[i].conc_ugl;
      const double w = (t_min - samples[i - 1].t_min) / span;
      return *samples[i - 1].conc_ugl + w * (*samples[i].conc_ugl - *samples[i - 1].conc_ugl);
    }
  }
  return *samples.back().conc_ugl;
}

}  // namespace

void SamplingPlan::validate() const {
  if (!(first_sample_delay_min >= 0.0)) throw DomainError("plan: first_sample_delay must be >= 0");
  if (!(aliquot_volume_ml > 0.0)) throw DomainError("plan: aliquot_volume must be > 0");
  if (!(composite_bottle_l > 0.0)) throw DomainError("plan: composite_bottle must be > 0");
  if (!(trigger_volume_l > 0.0)) throw DomainError("plan: trigger_volume must be > 0");
  if (aliquots_per_bottle() < 1)
    throw DomainError("plan: composite bottle smaller than one aliquot");
}

int SamplingPlan::aliquots_per_bottle() const {
  return static_cast<int>(std::floor(composite_bottle_l * 1000.0 / aliquot_volume_ml));
}

double event_load(const std::vector<RunoffSample>& samples, double area_ha) {
  if (!(area_ha > 0.0)) throw DomainError("event_load: area_ha must be > 0");
  validate_series(samples, /*need_concentrations=*/true);
  double mass_ug = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dt_s = min_to_s(samples[i].t_min - samples[i - 1].t_min);
    const double rate_prev = *samples[i - 1].conc_ugl * samples[i - 1].flow_lps;  // ug/s
    const double rate_next = *samples[i].conc_ugl * samples[i].flow_lps;
    mass_ug += 0.5 * (rate_prev + rate_next) * dt_s;
  }
  return ug_to_g(mass_ug) / area_ha;
}

double composite_concentration(const std::vector<RunoffSample>& samples, const SamplingPlan& plan) {
  plan.validate();
  validate_series(samples, /*need_concentrations=*/true);

  const std::vector<double> volume = cumulative_volume_l(samples);
  const double end_min = samples.back().t_min;
  std::vector<double> aliquot_conc;

  if (plan.first_sample_delay_min > end_min)
    throw StatsError("composite_concentration: runoff ended before the first sample");
  aliquot_conc.push_back(interpolate_concentration(samples, plan.first_sample_delay_min));

  // Volume already drained when the first aliquot was taken.
  double trigger_base_l = 0.0;
  {
    std::size_t seg = 1;
    while (seg < samples.size() && samples[seg].t_min < plan.first_sample_delay_min) ++seg;
    if (seg < samples.size()) {
      const double t0 = samples[seg - 1].t_min;
      const double span = samples[seg].t_min - t0;
      const double w = span == 0.0 ? 0.0 : (plan.first_sample_delay_min - t0) / span;
      trigger_base_l = volume[seg - 1] + w * (volume[seg] - volume[seg - 1]);
    } else {
      trigger_base_l = volume.back();
    }
  }

  constexpr std::size_t kMaxAliquots = 1000000;
  double next_target_l = trigger_base_l + plan.trigger_volume_l;
  std::size_t seg = 1;
  while (aliquot_conc.size() < kMaxAliquots) {
    while (seg < samples.size() && volume[seg] < next_target_l) ++seg;
    if (seg >= samples.size()) break;  // event ended before the next trigger
    const double seg_volume = volume[seg] - volume[seg - 1];
    const double w = seg_volume == 0.0 ? 1.0 : (next_target_l - volume[seg - 1]) / seg_volume;
    const double t_min = samples[seg - 1].t_min + w * (samples[seg].t_min - samples[seg - 1].t_min);
    aliquot_conc.push_back(interpolate_concentration(samples, t_min));
    next_target_l += plan.trigger_volume_l;
  }
  if (aliquot_conc.size() >= kMaxAliquots)
    throw DomainError("composite_concentration: trigger volume too small for this event");

  double sum = 0.0;
  for (double c : aliquot_conc) sum += c;
  return sum / static_cast<double>(aliquot_conc.size());
}

double reduction(double blanket_value, double spot_value) {
  if (!(blanket_value > 0.0)) throw StatsError("reduction: blanket value must be > 0");
  if (!(spot_value >= 0.0)) throw DomainError("reduction: spot value must be >= 0");
  return 1.0 - spot_value / blanket_value;
}

AggregateReductions aggregate_reductions(const std::vector<RunoffPair>& pairs) {
  if (pairs.empty()) throw StatsError("aggregate_reductions: no runoff pairs");
  AggregateReductions agg;
  for (const RunoffPair& pair : pairs) {
    agg.mean_concentration_reduction +=
        reduction(pair.blanket.composite_concentration_ugl, pair.spot.composite_concentration_ugl);
    agg.mean_load_reduction += reduction(pair.blanket.load_g_ha, pair.spot.load_g_ha);
  }
  agg.mean_concentration_reduction /= static_cast<double>(pairs.size());
  agg.mean_load_reduction /= static_cast<double>(pairs.size());
  return agg;
}

RunoffEvent simulate_runoff(double applied_rate_g_ha, double runoff_fraction,
                            double runoff_volume_l_ha) {
  if (!(applied_rate_g_ha >= 0.0)) throw DomainError("simulate_runoff: applied rate must be >= 0");
  if (!(runoff_fraction >= 0.0 && runoff_fraction <= 1.0))
    throw DomainError("simulate_runoff: runoff_fraction must be in [0, 1]");
  if (!(runoff_volume_l_ha > 0.0)) throw DomainError("simulate_runoff: runoff volume must be > 0");
  RunoffEvent event;
  event.load_g_ha = applied_rate_g_ha * runoff_fraction;
  event.composite_concentration_ugl = event.load_g_ha * kUgPerG / runoff_volume_l_ha;
  return event;
}

}  // namespace spotspray
