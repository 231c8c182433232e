#pragma once

#include <cstdint>
#include <vector>

#include "spotspray/errors.hpp"

namespace spotspray {

// Per-treatment aggregates for one trial.
struct TreatmentStats {
  std::int64_t weeds_sprayed = 0;
  std::int64_t weeds_missed = 0;
  double usage_l_ha = 0.0;
  std::int64_t images_total = 0;
  std::int64_t images_with_detection = 0;
  double area_ha = 0.0;

  void validate() const;
};

struct TrialSummary {
  int trial_id = 0;
  TreatmentStats spot;
  TreatmentStats blanket;
  double hit_rate_spot = 0.0;
  double hit_rate_blanket = 0.0;
  double efficacy = 0.0;
  double usage_reduction_fraction = 0.0;
};

struct StatResult {
  double statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;  // two-sided
};

// Fraction of target weeds knocked down: sprayed / (sprayed + missed).
double hit_rate(std::int64_t sprayed, std::int64_t missed);

// Spot-spray hit rate as a fraction of the blanket hit rate.
double efficacy(double spot_hit_rate, double blanket_hit_rate);

// Fractional herbicide saving of spot over blanket: 1 - spot/blanket.
double usage_reduction(double blanket_usage_l_ha, double spot_usage_l_ha);

// Density proxy: images with at least one detection over total images.
double weed_density(std::int64_t images_with_detection, std::int64_t images_total);

// Product-moment correlation; requires equal lengths >= 3 and non-constant
// samples.
double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys);

// Welch's unequal-variance two-sample t-test with Welch-Satterthwaite
// degrees of freedom and a two-sided p-value. Identical samples give t = 0,
// p = 1.
StatResult welch_t(const std::vector<double>& sample_a, const std::vector<double>& sample_b);

// Same test evaluated from summary statistics (means, sample sds, sizes)
// instead of raw samples — the form used when only published summary rows
// are available.
StatResult welch_t_from_summary(double mean_a, double sd_a, std::int64_t n_a, double mean_b,
                                double sd_b, std::int64_t n_b);

// One-sample t-test of paired differences against zero; df = n - 1.
StatResult paired_t(const std::vector<double>& diffs);

// Two-sided tail probability of Student's t: the regularized incomplete
// beta function I_{df/(df+t^2)}(df/2, 1/2).
double t_p_value(double t, double df);

// Sample mean; requires non-empty input.
double mean(const std::vector<double>& xs);

// Sample standard deviation with n-1 denominator; requires n >= 2.
double sample_sd(const std::vector<double>& xs);

// Combines one trial's two treatment aggregates into the summary row:
// hit rates from counts, efficacy, usage reduction.
TrialSummary summarize_trial(int trial_id, const TreatmentStats& spot,
                             const TreatmentStats& blanket);

// Same summary when only measured rates and usages are known (ingested
// trial tables carry percentages, not raw counts).
TrialSummary summarize_trial(int trial_id, double hit_rate_spot, double spot_usage_l_ha,
                             double hit_rate_blanket, double blanket_usage_l_ha);

// Nearest-integer percentage of a fraction, the rounding used in reports.
int round_pct(double fraction);

}  // namespace spotspray
