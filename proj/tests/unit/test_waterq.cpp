#include <cmath>
#include <vector>

#include "doctest.h"
#include "spotspray/analysis.hpp"
#include "spotspray/waterq.hpp"

using namespace spotspray;

namespace {

RunoffSample sample(double t_min, double flow_lps, double conc_ugl) {
  RunoffSample s;
  s.t_min = t_min;
  s.flow_lps = flow_lps;
  s.conc_ugl = conc_ugl;
  return s;
}

SamplingPlan plan_with_trigger(double trigger_volume_l) {
  SamplingPlan plan;
  plan.trigger_volume_l = trigger_volume_l;
  return plan;
}

RunoffPair pair_of(double conc_blanket, double conc_spot, double load_blanket, double load_spot) {
  RunoffPair pair;
  pair.blanket.composite_concentration_ugl = conc_blanket;
  pair.blanket.load_g_ha = load_blanket;
  pair.spot.composite_concentration_ugl = conc_spot;
  pair.spot.load_g_ha = load_spot;
  return pair;
}

}  // namespace

TEST_CASE("event load of a constant event") {
  // 100 ug/L x 1 L/s x 10000 s = 1e6 ug = 1 g over 1 ha.
  const std::vector<RunoffSample> samples = {sample(0.0, 1.0, 100.0),
                                             sample(10000.0 / 60.0, 1.0, 100.0)};
  CHECK(event_load(samples, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(event_load(samples, 2.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("zero concentration carries zero load") {
  const std::vector<RunoffSample> samples = {sample(0.0, 2.0, 0.0), sample(30.0, 1.0, 0.0),
                                             sample(60.0, 3.0, 0.0)};
  CHECK(event_load(samples, 1.5) == 0.0);
}

TEST_CASE("event load is linear in concentration") {
  std::vector<RunoffSample> base = {sample(0.0, 2.0, 10.0), sample(20.0, 1.5, 25.0),
                                    sample(45.0, 0.5, 5.0)};
  std::vector<RunoffSample> doubled = base;
  for (RunoffSample& s : doubled) s.conc_ugl = *s.conc_ugl * 2.0;
  CHECK(event_load(doubled, 1.0) == doctest::Approx(2.0 * event_load(base, 1.0)).epsilon(1e-12));
}

TEST_CASE("event load rejects malformed series") {
  const std::vector<RunoffSample> ok = {sample(0.0, 1.0, 10.0), sample(10.0, 1.0, 10.0)};
  CHECK_THROWS_AS((void)event_load(ok, 0.0), DomainError);
  CHECK_THROWS_AS((void)event_load({sample(0.0, 1.0, 10.0)}, 1.0), DomainError);

  std::vector<RunoffSample> missing = ok;
  missing[1].conc_ugl.reset();
  CHECK_THROWS_AS((void)event_load(missing, 1.0), DomainError);

  std::vector<RunoffSample> backwards = {sample(10.0, 1.0, 5.0), sample(0.0, 1.0, 5.0)};
  CHECK_THROWS_AS((void)event_load(backwards, 1.0), DomainError);

  std::vector<RunoffSample> negative_flow = ok;
  negative_flow[0].flow_lps = -1.0;
  CHECK_THROWS_AS((void)event_load(negative_flow, 1.0), DomainError);
}

TEST_CASE("composite of a constant event equals the constant for any plan") {
  const std::vector<RunoffSample> samples = {sample(0.0, 2.0, 42.0), sample(10.0, 1.0, 42.0),
                                             sample(30.0, 5.0, 42.0), sample(60.0, 0.5, 42.0)};
  for (double trigger : {10.0, 500.0, 2000.0}) {
    CHECK(composite_concentration(samples, plan_with_trigger(trigger)) ==
          doctest::Approx(42.0).epsilon(1e-12));
  }
}

TEST_CASE("two equal aliquots average their concentrations") {
  // Constant 1 L/s flow: 60 L/min, 12000 L over the 200 min event. The first
  // aliquot lands at minute 1 (conc 10); a 6000 L trigger fires once more at
  // minute 101 (conc 30).
  const std::vector<RunoffSample> samples = {sample(0.0, 1.0, 10.0), sample(49.0, 1.0, 10.0),
                                             sample(51.0, 1.0, 30.0), sample(200.0, 1.0, 30.0)};
  CHECK(composite_concentration(samples, plan_with_trigger(6000.0)) ==
        doctest::Approx(20.0).epsilon(1e-12));
}

TEST_CASE("ramp concentration composites to the mean of the aliquot times") {
  // C(t) = t with uniform 1 L/s flow over 100 min. A 600 L trigger fires
  // every 10 minutes after the minute-1 aliquot: t = 1, 11, ..., 91, whose
  // mean is 46.
  const std::vector<RunoffSample> samples = {sample(0.0, 1.0, 0.0), sample(100.0, 1.0, 100.0)};
  CHECK(composite_concentration(samples, plan_with_trigger(600.0)) ==
        doctest::Approx(46.0).epsilon(1e-12));
}

TEST_CASE("an event that ends before the first sample has no composite") {
  const std::vector<RunoffSample> samples = {sample(0.0, 1.0, 10.0), sample(0.5, 1.0, 10.0)};
  SamplingPlan plan = plan_with_trigger(100.0);
  plan.first_sample_delay_min = 1.0;
  CHECK_THROWS_AS((void)composite_concentration(samples, plan), StatsError);
}

TEST_CASE("sampling plan validation") {
  SamplingPlan plan;
  plan.trigger_volume_l = 500.0;
  CHECK_NOTHROW(plan.validate());
  CHECK(plan.aliquots_per_bottle() == 10);

  SamplingPlan no_trigger;
  CHECK_THROWS_AS(no_trigger.validate(), DomainError);

  SamplingPlan big_aliquot = plan;
  big_aliquot.aliquot_volume_ml = 1500.0;
  CHECK_THROWS_AS(big_aliquot.validate(), DomainError);

  SamplingPlan negative_delay = plan;
  negative_delay.first_sample_delay_min = -1.0;
  CHECK_THROWS_AS(negative_delay.validate(), DomainError);
}

TEST_CASE("reduction of spot against blanket") {
  CHECK(reduction(111.5, 54.25) == doctest::Approx(0.5134529148).epsilon(1e-9));
  CHECK(round_pct(reduction(111.5, 54.25)) == 51);
  CHECK(reduction(0.03, 0.01) == doctest::Approx(0.6666666667).epsilon(1e-9));
  CHECK(round_pct(reduction(0.03, 0.01)) == 67);
  CHECK(reduction(5.5, 5.5) == 0.0);
  CHECK_THROWS_AS((void)reduction(0.0, 1.0), StatsError);
  CHECK_THROWS_AS((void)reduction(1.0, -1.0), DomainError);
}

TEST_CASE("aggregate reductions average the unrounded per-row values") {
  // The five transcribed water-quality rows (conc blanket/spot, load blanket/spot).
  const std::vector<RunoffPair> pairs = {
      pair_of(111.5, 54.25, 15.0, 5.94), pair_of(3.56, 2.13, 0.48, 0.23),
      pair_of(0.5, 0.27, 0.03, 0.01),    pair_of(28.95, 21.68, 2.04, 0.91),
      pair_of(0.74, 0.49, 0.74, 0.49)};
  const AggregateReductions agg = aggregate_reductions(pairs);
  CHECK(std::abs(agg.mean_concentration_reduction - 0.393) < 5e-4);
  CHECK(std::abs(agg.mean_load_reduction - 0.537) < 5e-4);
  CHECK(round_pct(agg.mean_concentration_reduction) == 39);
  CHECK(round_pct(agg.mean_load_reduction) == 54);
}

TEST_CASE("a single pair aggregates to its own reduction") {
  const std::vector<RunoffPair> one = {pair_of(100.0, 40.0, 2.0, 1.5)};
  const AggregateReductions agg = aggregate_reductions(one);
  CHECK(agg.mean_concentration_reduction == doctest::Approx(0.6));
  CHECK(agg.mean_load_reduction == doctest::Approx(0.25));
  CHECK_THROWS_AS((void)aggregate_reductions({}), StatsError);
}

TEST_CASE("proportional runoff surrogate") {
  const RunoffEvent none = simulate_runoff(0.0, 0.05, 1000.0);
  CHECK(none.load_g_ha == 0.0);
  CHECK(none.composite_concentration_ugl == 0.0);

  const RunoffEvent full = simulate_runoff(10.0, 0.05, 1000.0);
  const RunoffEvent half = simulate_runoff(5.0, 0.05, 1000.0);
  CHECK(half.load_g_ha == doctest::Approx(full.load_g_ha / 2.0).epsilon(1e-15));
  CHECK(half.composite_concentration_ugl ==
        doctest::Approx(full.composite_concentration_ugl / 2.0).epsilon(1e-15));
  CHECK(full.load_g_ha == doctest::Approx(0.5));
  CHECK(full.composite_concentration_ugl == doctest::Approx(500.0));

  CHECK_THROWS_AS((void)simulate_runoff(-1.0, 0.05, 1000.0), DomainError);
  CHECK_THROWS_AS((void)simulate_runoff(1.0, 1.5, 1000.0), DomainError);
  CHECK_THROWS_AS((void)simulate_runoff(1.0, 0.05, 0.0), DomainError);
}

TEST_CASE("surrogate loads scale exactly with the applied ratio") {
  // Dyadic inputs keep the arithmetic exact: 2/8 = 0.25 bitwise.
  const RunoffEvent blanket = simulate_runoff(8.0, 0.5, 1000.0);
  const RunoffEvent spot = simulate_runoff(2.0, 0.5, 1000.0);
  CHECK(spot.load_g_ha / blanket.load_g_ha == 0.25);

  // The published 35% usage reduction maps onto the same load reduction.
  const RunoffEvent b200 = simulate_runoff(200.0, 0.05, 1000.0);
  const RunoffEvent s70 = simulate_runoff(70.0, 0.05, 1000.0);
  CHECK(s70.load_g_ha / b200.load_g_ha == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(reduction(b200.load_g_ha, s70.load_g_ha) ==
        doctest::Approx(usage_reduction(200.0, 70.0)).epsilon(1e-15));
}
