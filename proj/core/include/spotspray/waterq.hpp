#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spotspray/errors.hpp"
#include "spotspray/fieldgen.hpp"

namespace spotspray {

// One flume reading during an irrigation runoff event.
struct RunoffSample {
  double t_min = 0.0;     // minutes since runoff start
  double flow_lps = 0.0;  // litres/second
  std::optional<double> conc_ugl;  // active-ingredient concentration, when assayed
};

// Composite result for one (ingredient, treatment) runoff event.
struct RunoffEvent {
  std::string active_ingredient;
  Treatment treatment = Treatment::blanket;
  double area_ha = 0.0;
  std::vector<RunoffSample> samples;
  double composite_concentration_ugl = 0.0;
  double load_g_ha = 0.0;
};

// Field sampling protocol: one fixed-size aliquot shortly after runoff
// starts, then one per `trigger_volume_l` litres of cumulative flow, pooled
// into composite bottles.
struct SamplingPlan {
  double first_sample_delay_min = 1.0;
  double aliquot_volume_ml = 100.0;
  double composite_bottle_l = 1.0;
  double trigger_volume_l = 0.0;

  void validate() const;
  // Aliquots one bottle holds before rotation.
  int aliquots_per_bottle() const;
};

// Mass of active ingredient leaving the field per hectare: the trapezoidal
// integral of concentration x flow over the event, converted ug -> g,
// divided by the drained area. Every sample must carry a concentration.
double event_load(const std::vector<RunoffSample>& samples, double area_ha);

// Event-mean concentration as the composite sampler sees it: aliquot times
// follow the plan's volume trigger (cumulative flow integrated
// trapezoidally, inverted piecewise-linearly), and the composite is the
// unweighted mean over equal-volume aliquots. Throws StatsError when the
// event triggers no aliquot.
double composite_concentration(const std::vector<RunoffSample>& samples, const SamplingPlan& plan);

// Fractional decrease of a spot-treatment value against blanket:
// 1 - spot/blanket.
double reduction(double blanket_value, double spot_value);

struct RunoffPair {
  RunoffEvent blanket;
  RunoffEvent spot;
};

struct AggregateReductions {
  double mean_concentration_reduction = 0.0;
  double mean_load_reduction = 0.0;
};

// Averages the unrounded per-ingredient reductions (concentration and load)
// across trials. Rounding only happens at report time.
AggregateReductions aggregate_reductions(const std::vector<RunoffPair>& pairs);

// Proportional-runoff surrogate: a fixed fraction of the applied active
// ingredient leaves with a fixed runoff volume, so load = applied *
// fraction and concentration = load * 1e6 / volume. Labels (ingredient,
// treatment, area) are the caller's to fill.
RunoffEvent simulate_runoff(double applied_rate_g_ha, double runoff_fraction,
                            double runoff_volume_l_ha);

}  // namespace spotspray
