#include "spotspray/analysis.hpp"

#include <cmath>

namespace spotspray {

void TreatmentStats::validate() const {
  if (weeds_sprayed < 0 || weeds_missed < 0) throw DomainError("stats: weed counts must be >= 0");
  if (!(usage_l_ha >= 0.0)) throw DomainError("stats: usage must be >= 0");
  if (images_total < 0 || images_with_detection < 0)
    throw DomainError("stats: image counts must be >= 0");
  if (images_with_detection > images_total)
    throw DomainError("stats: images_with_detection cannot exceed images_total");
  if (!(area_ha >= 0.0)) throw DomainError("stats: area must be >= 0");
}

double hit_rate(std::int64_t sprayed, std::int64_t missed) {
  if (sprayed < 0 || missed < 0) throw DomainError("hit_rate: counts must be >= 0");
  if (sprayed + missed == 0) throw StatsError("hit_rate: undefined for zero weeds");
  return static_cast<double>(sprayed) / static_cast<double>(sprayed + missed);
}

double efficacy(double spot_hit_rate, double blanket_hit_rate) {
  if (!(blanket_hit_rate > 0.0)) throw StatsError("efficacy: blanket hit rate must be > 0");
  if (!(spot_hit_rate >= 0.0)) throw DomainError("efficacy: spot hit rate must be >= 0");
  return spot_hit_rate / blanket_hit_rate;
}

double usage_reduction(double blanket_usage_l_ha, double spot_usage_l_ha) {
  if (!(blanket_usage_l_ha > 0.0)) throw StatsError("usage_reduction: blanket usage must be > 0");
  if (!(spot_usage_l_ha >= 0.0)) throw DomainError("usage_reduction: spot usage must be >= 0");
  return 1.0 - spot_usage_l_ha / blanket_usage_l_ha;
}

double weed_density(std::int64_t images_with_detection, std::int64_t images_total) {
  if (images_total <= 0) throw StatsError("weed_density: images_total must be > 0");
  if (images_with_detection < 0 || images_with_detection > images_total)
    throw DomainError("weed_density: detections must be in [0, images_total]");
  return static_cast<double>(images_with_detection) / static_cast<double>(images_total);
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw StatsError("mean: empty sample");
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  if (xs.size() < 2) throw StatsError("sample_sd: need at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double pearson_r(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw StatsError("pearson_r: samples must have equal length");
  if (xs.size() < 3) throw StatsError("pearson_r: need at least 3 pairs");
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw StatsError("pearson_r: undefined for a constant sample");
  return sxy / std::sqrt(sxx * syy);
}

namespace {

// Continued fraction for the regularized incomplete beta function
// (modified Lentz evaluation of the standard even/odd coefficient scheme).
double ibeta_cf(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEps = 3.0e-16;
  constexpr double kTiny = 1.0e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw StatsError("t_p_value: incomplete beta continued fraction did not converge");
}

double ibeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * ibeta_cf(a, b, x) / a;
  return 1.0 - front * ibeta_cf(b, a, 1.0 - x) / b;
}

StatResult welch_from_moments(double mean_a, double var_a, double n_a, double mean_b, double var_b,
                              double n_b) {
  const double se2 = var_a / n_a + var_b / n_b;
  StatResult result;
  if (se2 == 0.0) {
    // Zero variance in both samples: defined only when the means agree.
    if (mean_a != mean_b)
      throw StatsError("welch_t: zero variance with differing means");
    result.statistic = 0.0;
    result.degrees_of_freedom = n_a + n_b - 2.0;
    result.p_value = 1.0;
    return result;
  }
  result.statistic = (mean_a - mean_b) / std::sqrt(se2);
  const double ra = var_a / n_a;
  const double rb = var_b / n_b;
  result.degrees_of_freedom = se2 * se2 / (ra * ra / (n_a - 1.0) + rb * rb / (n_b - 1.0));
  result.p_value = t_p_value(result.statistic, result.degrees_of_freedom);
  return result;
}

}  // namespace

StatResult welch_t(const std::vector<double>& sample_a, const std::vector<double>& sample_b) {
  if (sample_a.size() < 2 || sample_b.size() < 2)
    throw StatsError("welch_t: each sample needs at least 2 values");
  const double sd_a = sample_sd(sample_a);
  const double sd_b = sample_sd(sample_b);
  return welch_from_moments(mean(sample_a), sd_a * sd_a, static_cast<double>(sample_a.size()),
                            mean(sample_b), sd_b * sd_b, static_cast<double>(sample_b.size()));
}

StatResult welch_t_from_summary(double mean_a, double sd_a, std::int64_t n_a, double mean_b,
                                double sd_b, std::int64_t n_b) {
  if (n_a < 2 || n_b < 2) throw StatsError("welch_t: each sample needs at least 2 values");
  if (!(sd_a >= 0.0) || !(sd_b >= 0.0)) throw DomainError("welch_t: sds must be >= 0");
  return welch_from_moments(mean_a, sd_a * sd_a, static_cast<double>(n_a), mean_b, sd_b * sd_b,
                            static_cast<double>(n_b));
}

StatResult paired_t(const std::vector<double>& diffs) {
  if (diffs.size() < 2) throw StatsError("paired_t: need at least 2 differences");
  const double n = static_cast<double>(diffs.size());
  const double m = mean(diffs);
  const double sd = sample_sd(diffs);
  if (sd == 0.0) throw StatsError("paired_t: zero variance of differences");
  StatResult result;
  result.statistic = m / (sd / std::sqrt(n));
  result.degrees_of_freedom = n - 1.0;
  result.p_value = t_p_value(result.statistic, result.degrees_of_freedom);
  return result;
}

double t_p_value(double t, double df) {
  if (!(df > 0.0)) throw StatsError("t_p_value: df must be > 0");
  if (t == 0.0) return 1.0;
  return ibeta(df / 2.0, 0.5, df / (df + t * t));
}

TrialSummary summarize_trial(int trial_id, const TreatmentStats& spot,
                             const TreatmentStats& blanket) {
  spot.validate();
  blanket.validate();
  TrialSummary summary;
  summary.trial_id = trial_id;
  summary.spot = spot;
  summary.blanket = blanket;
  summary.hit_rate_spot = hit_rate(spot.weeds_sprayed, spot.weeds_missed);
  summary.hit_rate_blanket = hit_rate(blanket.weeds_sprayed, blanket.weeds_missed);
  summary.efficacy = efficacy(summary.hit_rate_spot, summary.hit_rate_blanket);
  summary.usage_reduction_fraction = usage_reduction(blanket.usage_l_ha, spot.usage_l_ha);
  return summary;
}

TrialSummary summarize_trial(int trial_id, double hit_rate_spot, double spot_usage_l_ha,
                             double hit_rate_blanket, double blanket_usage_l_ha) {
  TrialSummary summary;
  summary.trial_id = trial_id;
  summary.spot.usage_l_ha = spot_usage_l_ha;
  summary.blanket.usage_l_ha = blanket_usage_l_ha;
  summary.hit_rate_spot = hit_rate_spot;
  summary.hit_rate_blanket = hit_rate_blanket;
  summary.efficacy = efficacy(hit_rate_spot, hit_rate_blanket);
  summary.usage_reduction_fraction = usage_reduction(blanket_usage_l_ha, spot_usage_l_ha);
  return summary;
}

int round_pct(double fraction) { return static_cast<int>(std::lround(fraction * 100.0)); }

}  // namespace spotspray
