#include "spotspray/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "spotspray/errors.hpp"
#include "spotspray/units.hpp"

namespace spotspray {

namespace {

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, value);
  return buf;
}

std::string pct_cell(const std::optional<double>& fraction) {
  return fraction ? std::to_string(round_pct(*fraction)) : std::string();
}

std::string num_cell(const std::optional<double>& value) {
  return value ? csv::format_double(*value) : std::string();
}

std::string int_cell(const std::optional<double>& value) {
  return value ? std::to_string(static_cast<long long>(std::llround(*value))) : std::string();
}

std::string delta_pct_cell(const std::optional<double>& fraction, const std::optional<double>& published_pct) {
  if (!fraction || !published_pct) return {};
  return std::to_string(round_pct(*fraction) - static_cast<int>(std::llround(*published_pct)));
}

std::string delta_num_cell(const std::optional<double>& value, const std::optional<double>& published) {
  if (!value || !published) return {};
  return csv::format_double(*value - *published);
}

std::optional<double> opt_int_pct(const std::optional<int>& pct) {
  if (!pct) return std::nullopt;
  return static_cast<double>(*pct);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

// --- transcribed reference values ---

const std::vector<PublishedTrial>& published_trials() {
  static const std::vector<PublishedTrial> rows = {
      {1, std::nullopt, std::nullopt, 200.0, 177.0, std::nullopt, 11},
      {2, 97.0, 95.0, 198.0, 81.0, 98, 59},
      {3, 97.0, 89.0, 199.0, 183.0, 92, 8},
      {4, 99.0, 96.0, 211.0, 100.0, 97, 53},
      {5, 100.0, 100.0, 211.0, 178.0, 100, 16},
      {6, 100.0, 96.0, 207.0, 73.0, 96, 65},
  };
  return rows;
}

const PublishedTrial& published_trial_average() {
  static const PublishedTrial avg{0, 99.0, 95.0, 204.0, 132.0, 97, 35};
  return avg;
}

const std::vector<PublishedWater>& published_water() {
  static const std::vector<PublishedWater> rows = {
      {3, "Ametryn", 111.5, 15.0, 54.25, 5.94, 51, 60},
      {3, "Trifloxysulfuron", 3.56, 0.48, 2.13, 0.23, 40, 51},
      {4, "Haloxyfop", 0.5, 0.03, 0.27, 0.01, 46, 67},
      {5, "Acifluorfen", 28.95, 2.04, 21.68, 0.91, 25, 55},
      {6, "Halosulfuron", 0.74, 0.74, 0.49, 0.49, 34, 34},
  };
  return rows;
}

const PublishedWater& published_water_average() {
  static const PublishedWater avg{0, "", 29.05, 3.66, 15.76, 1.52, 39, 54};
  return avg;
}

PublishedStats published_stats() { return PublishedStats{}; }

std::vector<TrialTableRow> published_trials_as_table() {
  std::vector<TrialTableRow> rows;
  for (const PublishedTrial& t : published_trials()) {
    TrialTableRow blanket;
    blanket.trial = t.trial;
    blanket.treatment = Treatment::blanket;
    blanket.hit_rate_pct = t.hit_blanket_pct;
    blanket.usage_l_ha = t.usage_blanket_l_ha;
    rows.push_back(blanket);
    TrialTableRow spot;
    spot.trial = t.trial;
    spot.treatment = Treatment::spot;
    spot.hit_rate_pct = t.hit_spot_pct;
    spot.usage_l_ha = t.usage_spot_l_ha;
    rows.push_back(spot);
  }
  return rows;
}

std::vector<RunoffTableRow> published_water_as_table() {
  std::vector<RunoffTableRow> rows;
  for (const PublishedWater& w : published_water()) {
    rows.push_back({w.trial, w.ingredient, Treatment::blanket, w.conc_blanket_ugl, w.load_blanket_g_ha});
    rows.push_back({w.trial, w.ingredient, Treatment::spot, w.conc_spot_ugl, w.load_spot_g_ha});
  }
  return rows;
}

// --- builders ---

std::vector<TrialRow> pair_trial_rows(const std::vector<TrialTableRow>& rows) {
  std::vector<int> order;
  std::map<int, TrialRow> partial;
  std::map<int, std::pair<bool, bool>> seen;  // {blanket, spot}

  for (const TrialTableRow& r : rows) {
    if (partial.find(r.trial) == partial.end()) {
      order.push_back(r.trial);
      partial[r.trial].trial_id = r.trial;
    }
    TrialRow& row = partial[r.trial];
    auto& flags = seen[r.trial];
    const bool is_blanket = r.treatment == Treatment::blanket;
    bool& flag = is_blanket ? flags.first : flags.second;
    if (flag) {
      throw SchemaError("trial " + std::to_string(r.trial) + ": duplicate " +
                        std::string(to_string(r.treatment)) + " row");
    }
    flag = true;

    if (r.weeds_sprayed.has_value() != r.weeds_missed.has_value()) {
      throw SchemaError("trial " + std::to_string(r.trial) +
                        ": weeds_sprayed and weeds_missed must be given together");
    }
    std::optional<double> rate;
    if (r.weeds_sprayed && r.weeds_missed) {
      if (*r.weeds_sprayed + *r.weeds_missed > 0) rate = hit_rate(*r.weeds_sprayed, *r.weeds_missed);
    } else if (r.hit_rate_pct) {
      if (*r.hit_rate_pct < 0.0 || *r.hit_rate_pct > 100.0) {
        throw SchemaError("trial " + std::to_string(r.trial) + ": hit_rate_pct " +
                          csv::format_double(*r.hit_rate_pct) + " outside [0, 100]");
      }
      rate = *r.hit_rate_pct / 100.0;
    }
    std::optional<double> density;
    if (r.images_with_detection && r.images_total && *r.images_total > 0) {
      density = weed_density(*r.images_with_detection, *r.images_total);
    }

    if (is_blanket) {
      row.hit_rate_blanket = rate;
      row.usage_blanket_l_ha = r.usage_l_ha;
      row.density_blanket = density;
    } else {
      row.hit_rate_spot = rate;
      row.usage_spot_l_ha = r.usage_l_ha;
      row.density_spot = density;
    }
  }

  std::vector<TrialRow> out;
  out.reserve(order.size());
  for (int trial : order) {
    const auto& flags = seen[trial];
    if (!flags.first || !flags.second) {
      throw SchemaError("trial " + std::to_string(trial) +
                        ": needs exactly one blanket and one spot row");
    }
    TrialRow row = partial[trial];
    if (row.hit_rate_spot && row.hit_rate_blanket && *row.hit_rate_blanket > 0.0) {
      row.efficacy = efficacy(*row.hit_rate_spot, *row.hit_rate_blanket);
    }
    if (row.usage_spot_l_ha && row.usage_blanket_l_ha && *row.usage_blanket_l_ha > 0.0) {
      row.reduction = usage_reduction(*row.usage_blanket_l_ha, *row.usage_spot_l_ha);
    }
    out.push_back(row);
  }
  return out;
}

TrialRow average_trials(const std::vector<TrialRow>& trials) {
  if (trials.empty()) throw StatsError("cannot average an empty trial list");
  auto avg_of = [&trials](std::optional<double> TrialRow::* field) -> std::optional<double> {
    double sum = 0.0;
    int n = 0;
    for (const TrialRow& t : trials) {
      if (t.*field) {
        sum += *(t.*field);
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
  };

  TrialRow avg;
  avg.trial_id = 0;
  avg.hit_rate_blanket = avg_of(&TrialRow::hit_rate_blanket);
  avg.hit_rate_spot = avg_of(&TrialRow::hit_rate_spot);
  avg.usage_blanket_l_ha = avg_of(&TrialRow::usage_blanket_l_ha);
  avg.usage_spot_l_ha = avg_of(&TrialRow::usage_spot_l_ha);
  avg.efficacy = avg_of(&TrialRow::efficacy);
  avg.density_blanket = avg_of(&TrialRow::density_blanket);
  avg.density_spot = avg_of(&TrialRow::density_spot);
  // The average row's reduction compares the averaged usages rather than
  // averaging the per-trial reductions.
  if (avg.usage_blanket_l_ha && avg.usage_spot_l_ha && *avg.usage_blanket_l_ha > 0.0) {
    avg.reduction = usage_reduction(*avg.usage_blanket_l_ha, *avg.usage_spot_l_ha);
  }
  return avg;
}

std::optional<UsageStatsBlock> compute_usage_stats(const std::vector<TrialRow>& trials) {
  std::vector<double> spot;
  std::vector<double> blanket;
  std::vector<double> diffs;
  std::vector<double> kd_spot;
  std::vector<double> kd_blanket;
  std::vector<double> densities;
  std::vector<double> density_usages;

  for (const TrialRow& t : trials) {
    if (t.usage_spot_l_ha) spot.push_back(*t.usage_spot_l_ha);
    if (t.usage_blanket_l_ha) blanket.push_back(*t.usage_blanket_l_ha);
    if (t.usage_spot_l_ha && t.usage_blanket_l_ha) {
      diffs.push_back(*t.usage_spot_l_ha - *t.usage_blanket_l_ha);
    }
    if (t.hit_rate_spot) kd_spot.push_back(*t.hit_rate_spot * 100.0);
    if (t.hit_rate_blanket) kd_blanket.push_back(*t.hit_rate_blanket * 100.0);
    if (t.density_spot && t.usage_spot_l_ha) {
      densities.push_back(*t.density_spot);
      density_usages.push_back(*t.usage_spot_l_ha);
    }
  }
  if (spot.size() < 2 || blanket.size() < 2) return std::nullopt;

  UsageStatsBlock block;
  block.spot_mean = mean(spot);
  block.spot_sd = sample_sd(spot);
  block.n_spot = static_cast<int>(spot.size());
  block.blanket_mean = mean(blanket);
  block.blanket_sd = sample_sd(blanket);
  block.n_blanket = static_cast<int>(blanket.size());
  block.welch = welch_t(spot, blanket);
  if (diffs.size() >= 2) {
    try {
      block.paired = paired_t(diffs);
    } catch (const StatsError&) {
      block.paired = std::nullopt;  // zero-variance differences
    }
  }
  if (kd_spot.size() >= 2) {
    block.knockdown_spot_mean = mean(kd_spot);
    block.knockdown_spot_sd = sample_sd(kd_spot);
  }
  block.n_knockdown_spot = static_cast<int>(kd_spot.size());
  if (kd_blanket.size() >= 2) {
    block.knockdown_blanket_mean = mean(kd_blanket);
    block.knockdown_blanket_sd = sample_sd(kd_blanket);
  }
  block.n_knockdown_blanket = static_cast<int>(kd_blanket.size());
  if (densities.size() >= 3) {
    try {
      block.pearson_density_spot_usage = pearson_r(densities, density_usages);
    } catch (const StatsError&) {
      // constant column; leave the correlation absent
    }
  }
  return block;
}

WaterBlock build_water_block(const std::vector<RunoffTableRow>& rows) {
  using Key = std::pair<int, std::string>;
  std::vector<Key> order;
  std::map<Key, std::pair<std::optional<RunoffTableRow>, std::optional<RunoffTableRow>>> groups;

  for (const RunoffTableRow& r : rows) {
    const Key key{r.trial, r.ingredient};
    if (groups.find(key) == groups.end()) order.push_back(key);
    auto& slot = (r.treatment == Treatment::blanket) ? groups[key].first : groups[key].second;
    if (slot) {
      throw SchemaError("runoff table: duplicate " + std::string(to_string(r.treatment)) +
                        " row for trial " + std::to_string(r.trial) + " ingredient '" +
                        r.ingredient + "'");
    }
    slot = r;
  }
  if (order.empty()) throw SchemaError("runoff table: no rows");

  WaterBlock block;
  std::vector<RunoffPair> pairs;
  for (const Key& key : order) {
    const auto& group = groups[key];
    if (!group.first || !group.second) {
      throw SchemaError("runoff table: trial " + std::to_string(key.first) + " ingredient '" +
                        key.second + "' needs one blanket and one spot row");
    }
    WaterRow w;
    w.trial = key.first;
    w.ingredient = key.second;
    w.conc_blanket_ugl = group.first->conc_ugl;
    w.load_blanket_g_ha = group.first->load_g_ha;
    w.conc_spot_ugl = group.second->conc_ugl;
    w.load_spot_g_ha = group.second->load_g_ha;
    w.conc_reduction = reduction(w.conc_blanket_ugl, w.conc_spot_ugl);
    w.load_reduction = reduction(w.load_blanket_g_ha, w.load_spot_g_ha);
    block.rows.push_back(w);

    RunoffPair pair;
    pair.blanket.active_ingredient = w.ingredient;
    pair.blanket.treatment = Treatment::blanket;
    pair.blanket.composite_concentration_ugl = w.conc_blanket_ugl;
    pair.blanket.load_g_ha = w.load_blanket_g_ha;
    pair.spot.active_ingredient = w.ingredient;
    pair.spot.treatment = Treatment::spot;
    pair.spot.composite_concentration_ugl = w.conc_spot_ugl;
    pair.spot.load_g_ha = w.load_spot_g_ha;
    pairs.push_back(pair);
  }

  const double n = static_cast<double>(block.rows.size());
  for (const WaterRow& w : block.rows) {
    block.mean_conc_blanket_ugl += w.conc_blanket_ugl / n;
    block.mean_conc_spot_ugl += w.conc_spot_ugl / n;
    block.mean_load_blanket_g_ha += w.load_blanket_g_ha / n;
    block.mean_load_spot_g_ha += w.load_spot_g_ha / n;
  }
  block.aggregate = aggregate_reductions(pairs);
  return block;
}

ReportBundle build_report(std::vector<TrialRow> trials, std::optional<WaterBlock> water,
                          bool paper_compare, const std::string& input_hash_hex,
                          std::optional<std::uint64_t> seed) {
  ReportBundle bundle;
  bundle.trials = std::move(trials);
  if (!bundle.trials.empty()) bundle.average = average_trials(bundle.trials);
  bundle.usage_stats = compute_usage_stats(bundle.trials);
  if (water) bundle.water = std::move(*water);
  bundle.paper_compare = paper_compare;
  bundle.input_hash_hex = input_hash_hex;
  bundle.seed = seed;
  bundle.version = kVersion;

  bundle.notes.push_back(
      "detection model: repeated views of one weed are treated as independent per-view "
      "classifications; correlated misses across consecutive frames are not modeled");

  if (paper_compare) {
    const PublishedStats ps = published_stats();
    if (bundle.usage_stats) {
      const UsageStatsBlock& s = *bundle.usage_stats;
      const StatResult from_summary =
          welch_t_from_summary(ps.spot_usage_mean, ps.spot_usage_sd, 6, ps.blanket_usage_mean,
                               ps.blanket_usage_sd, 6);
      std::string note =
          "published usage test statistic t = " + fmt("%.4f", ps.usage_t) + " (p = " +
          fmt("%.4f", ps.usage_p) +
          ", footnoted as a paired test) is not reproducible from the published usage columns: "
          "an unequal-variance test on the columns gives t = " +
          fmt("%.4f", s.welch.statistic) + " (p = " + fmt("%.4f", s.welch.p_value) + ")";
      if (s.paired) {
        note += ", a paired test gives t = " + fmt("%.4f", s.paired->statistic) + " (p = " +
                fmt("%.4f", s.paired->p_value) + ")";
      }
      note += ", and an unequal-variance test on the published summary rows (132 sd 50 vs 204 sd "
              "9, n = 6) gives t = " +
              fmt("%.4f", from_summary.statistic) + " (p = " + fmt("%.4f", from_summary.p_value) +
              ")";
      bundle.notes.push_back(note);
      bundle.notes.push_back(
          "published usage standard deviations (spot 50, blanket 9) differ from the standard "
          "deviations of the printed usage columns (spot " +
          fmt("%.2f", s.spot_sd) + ", blanket " + fmt("%.2f", s.blanket_sd) + ")");
      if (s.knockdown_spot_mean && s.knockdown_blanket_mean) {
        bundle.notes.push_back(
            "published knockdown summary (spot mean 94.67 sd 4.44, blanket mean 98.33 sd 1.37) "
            "does not match the printed per-trial hit rates (spot mean " +
            fmt("%.2f", *s.knockdown_spot_mean) + " sd " + fmt("%.2f", *s.knockdown_spot_sd) +
            ", blanket mean " + fmt("%.2f", *s.knockdown_blanket_mean) + " sd " +
            fmt("%.2f", *s.knockdown_blanket_sd) + " over " +
            std::to_string(s.n_knockdown_spot) + " reporting trials)");
      }
    }
    bundle.notes.push_back(
        "published correlation r = " + fmt("%.4f", ps.density_usage_r) +
        " (weed density vs herbicide used) relies on per-trial densities that were not "
        "published, so it cannot be recomputed from the tables");
  }
  return bundle;
}

// --- renderers ---

namespace {

const PublishedTrial* find_published_trial(int trial_id) {
  if (trial_id == 0) return &published_trial_average();
  for (const PublishedTrial& t : published_trials()) {
    if (t.trial == trial_id) return &t;
  }
  return nullptr;
}

const PublishedWater* find_published_water(int trial, const std::string& ingredient) {
  if (trial == 0 && ingredient.empty()) return &published_water_average();
  for (const PublishedWater& w : published_water()) {
    if (w.trial == trial && w.ingredient == ingredient) return &w;
  }
  return nullptr;
}

void append_trial_cells(std::vector<std::string>& cells, const TrialRow& row, bool paper_compare) {
  cells.push_back(pct_cell(row.hit_rate_blanket));
  cells.push_back(pct_cell(row.hit_rate_spot));
  cells.push_back(num_cell(row.usage_blanket_l_ha));
  cells.push_back(num_cell(row.usage_spot_l_ha));
  cells.push_back(pct_cell(row.efficacy));
  cells.push_back(pct_cell(row.reduction));
  cells.push_back(num_cell(row.density_blanket));
  cells.push_back(num_cell(row.density_spot));
  if (!paper_compare) return;

  const PublishedTrial* pub = find_published_trial(row.trial_id);
  const std::optional<double> none;
  const std::optional<double> pub_hit_b = pub ? pub->hit_blanket_pct : none;
  const std::optional<double> pub_hit_s = pub ? pub->hit_spot_pct : none;
  const std::optional<double> pub_usage_b =
      pub ? std::optional<double>(pub->usage_blanket_l_ha) : none;
  const std::optional<double> pub_usage_s =
      pub ? std::optional<double>(pub->usage_spot_l_ha) : none;
  const std::optional<double> pub_eff = pub ? opt_int_pct(pub->efficacy_pct) : none;
  const std::optional<double> pub_red =
      pub ? std::optional<double>(static_cast<double>(pub->reduction_pct)) : none;

  cells.push_back(int_cell(pub_hit_b));
  cells.push_back(int_cell(pub_hit_s));
  cells.push_back(num_cell(pub_usage_b));
  cells.push_back(num_cell(pub_usage_s));
  cells.push_back(int_cell(pub_eff));
  cells.push_back(int_cell(pub_red));
  cells.push_back(delta_pct_cell(row.hit_rate_blanket, pub_hit_b));
  cells.push_back(delta_pct_cell(row.hit_rate_spot, pub_hit_s));
  cells.push_back(delta_num_cell(row.usage_blanket_l_ha, pub_usage_b));
  cells.push_back(delta_num_cell(row.usage_spot_l_ha, pub_usage_s));
  cells.push_back(delta_pct_cell(row.efficacy, pub_eff));
  cells.push_back(delta_pct_cell(row.reduction, pub_red));
}

}  // namespace

csv::Table render_trials_table(const ReportBundle& bundle) {
  csv::Table table;
  table.header = {"trial",
                  "hit_rate_blanket_pct",
                  "hit_rate_spot_pct",
                  "usage_blanket_l_ha",
                  "usage_spot_l_ha",
                  "efficacy_pct",
                  "reduction_pct",
                  "density_blanket",
                  "density_spot"};
  if (bundle.paper_compare) {
    for (const char* name :
         {"pub_hit_rate_blanket_pct", "pub_hit_rate_spot_pct", "pub_usage_blanket_l_ha",
          "pub_usage_spot_l_ha", "pub_efficacy_pct", "pub_reduction_pct",
          "delta_hit_rate_blanket_pct", "delta_hit_rate_spot_pct", "delta_usage_blanket_l_ha",
          "delta_usage_spot_l_ha", "delta_efficacy_pct", "delta_reduction_pct"}) {
      table.header.push_back(name);
    }
  }
  for (const TrialRow& row : bundle.trials) {
    std::vector<std::string> cells{std::to_string(row.trial_id)};
    append_trial_cells(cells, row, bundle.paper_compare);
    table.rows.push_back(std::move(cells));
  }
  if (bundle.average) {
    std::vector<std::string> cells{"average"};
    append_trial_cells(cells, *bundle.average, bundle.paper_compare);
    table.rows.push_back(std::move(cells));
  }
  return table;
}

csv::Table render_stats_table(const ReportBundle& bundle) {
  csv::Table table;
  table.header = {"metric",      "spot_mean", "spot_sd", "spot_n", "blanket_mean",
                  "blanket_sd",  "blanket_n", "statistic", "df",   "p_value"};
  auto num = [](double v) { return csv::format_double(v); };

  if (bundle.usage_stats) {
    const UsageStatsBlock& s = *bundle.usage_stats;
    table.rows.push_back({"usage_welch", num(s.spot_mean), num(s.spot_sd),
                          std::to_string(s.n_spot), num(s.blanket_mean), num(s.blanket_sd),
                          std::to_string(s.n_blanket), num(s.welch.statistic),
                          num(s.welch.degrees_of_freedom), num(s.welch.p_value)});
    if (s.paired) {
      table.rows.push_back({"usage_paired", "", "", "", "", "", "", num(s.paired->statistic),
                            num(s.paired->degrees_of_freedom), num(s.paired->p_value)});
    }
    if (s.knockdown_spot_mean || s.knockdown_blanket_mean) {
      table.rows.push_back(
          {"knockdown_pct", s.knockdown_spot_mean ? num(*s.knockdown_spot_mean) : "",
           s.knockdown_spot_sd ? num(*s.knockdown_spot_sd) : "",
           std::to_string(s.n_knockdown_spot),
           s.knockdown_blanket_mean ? num(*s.knockdown_blanket_mean) : "",
           s.knockdown_blanket_sd ? num(*s.knockdown_blanket_sd) : "",
           std::to_string(s.n_knockdown_blanket), "", "", ""});
    }
    if (s.pearson_density_spot_usage) {
      table.rows.push_back({"density_spot_usage_pearson", "", "", "", "", "", "",
                            num(*s.pearson_density_spot_usage), "", ""});
    }
  }
  if (bundle.paper_compare) {
    const PublishedStats ps = published_stats();
    table.rows.push_back({"published_usage_paired", num(ps.spot_usage_mean), num(ps.spot_usage_sd),
                          "6", num(ps.blanket_usage_mean), num(ps.blanket_usage_sd), "6",
                          num(ps.usage_t), "", num(ps.usage_p)});
    const StatResult from_summary = welch_t_from_summary(
        ps.spot_usage_mean, ps.spot_usage_sd, 6, ps.blanket_usage_mean, ps.blanket_usage_sd, 6);
    table.rows.push_back({"published_usage_welch_from_summary", num(ps.spot_usage_mean),
                          num(ps.spot_usage_sd), "6", num(ps.blanket_usage_mean),
                          num(ps.blanket_usage_sd), "6", num(from_summary.statistic),
                          num(from_summary.degrees_of_freedom), num(from_summary.p_value)});
    table.rows.push_back({"published_knockdown_pct", num(ps.knockdown_spot_mean),
                          num(ps.knockdown_spot_sd), "", num(ps.knockdown_blanket_mean),
                          num(ps.knockdown_blanket_sd), "", "", "", ""});
    table.rows.push_back({"published_density_usage_pearson", "", "", "", "", "", "",
                          num(ps.density_usage_r), "", ""});
  }
  return table;
}

csv::Table render_water_table(const ReportBundle& bundle) {
  if (!bundle.water) throw StatsError("report has no water-quality block to render");
  const WaterBlock& block = *bundle.water;

  csv::Table table;
  table.header = {"trial",        "ingredient",        "conc_blanket_ugl",
                  "conc_spot_ugl", "conc_reduction_pct", "load_blanket_g_ha",
                  "load_spot_g_ha", "load_reduction_pct"};
  if (bundle.paper_compare) {
    for (const char* name :
         {"pub_conc_blanket_ugl", "pub_conc_spot_ugl", "pub_conc_reduction_pct",
          "pub_load_blanket_g_ha", "pub_load_spot_g_ha", "pub_load_reduction_pct",
          "delta_conc_blanket_ugl", "delta_conc_spot_ugl", "delta_conc_reduction_pct",
          "delta_load_blanket_g_ha", "delta_load_spot_g_ha", "delta_load_reduction_pct"}) {
      table.header.push_back(name);
    }
  }

  auto append_cells = [&bundle](std::vector<std::string>& cells, int trial,
                                const std::string& ingredient, double conc_b, double conc_s,
                                double conc_red, double load_b, double load_s, double load_red) {
    cells.push_back(csv::format_double(conc_b));
    cells.push_back(csv::format_double(conc_s));
    cells.push_back(std::to_string(round_pct(conc_red)));
    cells.push_back(csv::format_double(load_b));
    cells.push_back(csv::format_double(load_s));
    cells.push_back(std::to_string(round_pct(load_red)));
    if (!bundle.paper_compare) return;
    const PublishedWater* pub = find_published_water(trial, ingredient);
    if (pub == nullptr) {
      cells.insert(cells.end(), 12, std::string());
      return;
    }
    cells.push_back(csv::format_double(pub->conc_blanket_ugl));
    cells.push_back(csv::format_double(pub->conc_spot_ugl));
    cells.push_back(std::to_string(pub->conc_reduction_pct));
    cells.push_back(csv::format_double(pub->load_blanket_g_ha));
    cells.push_back(csv::format_double(pub->load_spot_g_ha));
    cells.push_back(std::to_string(pub->load_reduction_pct));
    cells.push_back(csv::format_double(conc_b - pub->conc_blanket_ugl));
    cells.push_back(csv::format_double(conc_s - pub->conc_spot_ugl));
    cells.push_back(std::to_string(round_pct(conc_red) - pub->conc_reduction_pct));
    cells.push_back(csv::format_double(load_b - pub->load_blanket_g_ha));
    cells.push_back(csv::format_double(load_s - pub->load_spot_g_ha));
    cells.push_back(std::to_string(round_pct(load_red) - pub->load_reduction_pct));
  };

  for (const WaterRow& w : block.rows) {
    std::vector<std::string> cells{std::to_string(w.trial), w.ingredient};
    append_cells(cells, w.trial, w.ingredient, w.conc_blanket_ugl, w.conc_spot_ugl,
                 w.conc_reduction, w.load_blanket_g_ha, w.load_spot_g_ha, w.load_reduction);
    table.rows.push_back(std::move(cells));
  }
  std::vector<std::string> avg{"average", ""};
  append_cells(avg, 0, "", block.mean_conc_blanket_ugl, block.mean_conc_spot_ugl,
               block.aggregate.mean_concentration_reduction, block.mean_load_blanket_g_ha,
               block.mean_load_spot_g_ha, block.aggregate.mean_load_reduction);
  table.rows.push_back(std::move(avg));
  return table;
}

namespace {

std::string text_cell(const std::optional<double>& v, const char* format) {
  return v ? fmt(format, *v) : std::string("-");
}

std::string text_pct(const std::optional<double>& v) {
  return v ? std::to_string(round_pct(*v)) : std::string("-");
}

void append_padded(std::ostringstream& out, const std::string& cell, int width) {
  out << std::setw(width) << cell;
}

}  // namespace

std::string render_report_text(const ReportBundle& bundle) {
  std::ostringstream out;
  out << "spot-spray field trial report\n";
  out << "=============================\n";
  out << "version:    " << bundle.version << "\n";
  out << "input hash: " << bundle.input_hash_hex << "\n";
  if (bundle.seed) out << "seed:       " << *bundle.seed << "\n";
  if (bundle.paper_compare) out << "mode:       compare against published field-trial values\n";
  out << "\n";

  if (!bundle.trials.empty()) {
    out << "knockdown and herbicide usage\n";
    out << "-----------------------------\n";
    std::ostringstream head;
    append_padded(head, "trial", 8);
    append_padded(head, "hit_b%", 8);
    append_padded(head, "hit_s%", 8);
    append_padded(head, "use_b", 10);
    append_padded(head, "use_s", 10);
    append_padded(head, "eff%", 7);
    append_padded(head, "red%", 7);
    append_padded(head, "dens_b", 10);
    append_padded(head, "dens_s", 10);
    out << head.str() << "\n";
    auto emit = [&out](const std::string& label, const TrialRow& row) {
      std::ostringstream line;
      append_padded(line, label, 8);
      append_padded(line, text_pct(row.hit_rate_blanket), 8);
      append_padded(line, text_pct(row.hit_rate_spot), 8);
      append_padded(line, text_cell(row.usage_blanket_l_ha, "%.2f"), 10);
      append_padded(line, text_cell(row.usage_spot_l_ha, "%.2f"), 10);
      append_padded(line, text_pct(row.efficacy), 7);
      append_padded(line, text_pct(row.reduction), 7);
      append_padded(line, text_cell(row.density_blanket, "%.4f"), 10);
      append_padded(line, text_cell(row.density_spot, "%.4f"), 10);
      out << line.str() << "\n";
    };
    for (const TrialRow& row : bundle.trials) emit(std::to_string(row.trial_id), row);
    if (bundle.average) emit("average", *bundle.average);
    out << "\n";
  }

  if (bundle.usage_stats) {
    const UsageStatsBlock& s = *bundle.usage_stats;
    out << "usage statistics\n";
    out << "----------------\n";
    out << "spot usage:    mean " << fmt("%.2f", s.spot_mean) << " L/ha, sd "
        << fmt("%.2f", s.spot_sd) << " (n = " << s.n_spot << ")\n";
    out << "blanket usage: mean " << fmt("%.2f", s.blanket_mean) << " L/ha, sd "
        << fmt("%.2f", s.blanket_sd) << " (n = " << s.n_blanket << ")\n";
    out << "unequal-variance t = " << fmt("%.4f", s.welch.statistic) << ", df = "
        << fmt("%.2f", s.welch.degrees_of_freedom) << ", p = " << fmt("%.4f", s.welch.p_value)
        << "\n";
    if (s.paired) {
      out << "paired t = " << fmt("%.4f", s.paired->statistic) << ", df = "
          << fmt("%.0f", s.paired->degrees_of_freedom) << ", p = "
          << fmt("%.4f", s.paired->p_value) << "\n";
    }
    if (s.knockdown_spot_mean && s.knockdown_blanket_mean) {
      out << "knockdown: spot mean " << fmt("%.2f", *s.knockdown_spot_mean) << "% sd "
          << fmt("%.2f", *s.knockdown_spot_sd) << " (n = " << s.n_knockdown_spot
          << "), blanket mean " << fmt("%.2f", *s.knockdown_blanket_mean) << "% sd "
          << fmt("%.2f", *s.knockdown_blanket_sd) << " (n = " << s.n_knockdown_blanket << ")\n";
    }
    if (s.pearson_density_spot_usage) {
      out << "pearson r (spot weed density vs spot usage) = "
          << fmt("%.4f", *s.pearson_density_spot_usage) << "\n";
    }
    out << "\n";
  }

  if (bundle.water) {
    const WaterBlock& w = *bundle.water;
    out << "water quality\n";
    out << "-------------\n";
    std::ostringstream head;
    append_padded(head, "trial", 8);
    append_padded(head, "ingredient", 18);
    append_padded(head, "conc_b", 10);
    append_padded(head, "conc_s", 10);
    append_padded(head, "red%", 7);
    append_padded(head, "load_b", 10);
    append_padded(head, "load_s", 10);
    append_padded(head, "red%", 7);
    out << head.str() << "\n";
    for (const WaterRow& row : w.rows) {
      std::ostringstream line;
      append_padded(line, std::to_string(row.trial), 8);
      append_padded(line, row.ingredient, 18);
      append_padded(line, fmt("%.2f", row.conc_blanket_ugl), 10);
      append_padded(line, fmt("%.2f", row.conc_spot_ugl), 10);
      append_padded(line, std::to_string(round_pct(row.conc_reduction)), 7);
      append_padded(line, fmt("%.2f", row.load_blanket_g_ha), 10);
      append_padded(line, fmt("%.2f", row.load_spot_g_ha), 10);
      append_padded(line, std::to_string(round_pct(row.load_reduction)), 7);
      out << line.str() << "\n";
    }
    std::ostringstream line;
    append_padded(line, "average", 8);
    append_padded(line, "", 18);
    append_padded(line, fmt("%.2f", w.mean_conc_blanket_ugl), 10);
    append_padded(line, fmt("%.2f", w.mean_conc_spot_ugl), 10);
    append_padded(line, std::to_string(round_pct(w.aggregate.mean_concentration_reduction)), 7);
    append_padded(line, fmt("%.2f", w.mean_load_blanket_g_ha), 10);
    append_padded(line, fmt("%.2f", w.mean_load_spot_g_ha), 10);
    append_padded(line, std::to_string(round_pct(w.aggregate.mean_load_reduction)), 7);
    out << line.str() << "\n";
    out << "aggregate reductions (mean of unrounded row reductions): concentration "
        << fmt("%.2f", w.aggregate.mean_concentration_reduction * 100.0) << "%, load "
        << fmt("%.2f", w.aggregate.mean_load_reduction * 100.0) << "%\n";
    out << "\n";
  }

  if (bundle.paper_compare) {
    const PublishedStats ps = published_stats();
    out << "published reference statistics\n";
    out << "------------------------------\n";
    out << "usage: spot 132 sd 50, blanket 204 sd 9, t = " << fmt("%.4f", ps.usage_t)
        << " (p = " << fmt("%.4f", ps.usage_p) << ", footnoted as a paired test)\n";
    out << "knockdown: spot 94.67 sd 4.44, blanket 98.33 sd 1.37\n";
    out << "correlation (weed density vs herbicide used): r = " << fmt("%.4f", ps.density_usage_r)
        << "\n";
    out << "\n";
  }

  if (!bundle.notes.empty()) {
    out << "notes\n";
    out << "-----\n";
    for (const std::string& note : bundle.notes) out << "- " << note << "\n";
  }
  return out.str();
}

std::string render_report_json(const ReportBundle& bundle) {
  using json = nlohmann::ordered_json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };

  auto trial_to_json = [&opt](const TrialRow& t) {
    json j;
    j["trial"] = t.trial_id;
    j["hit_rate_blanket"] = opt(t.hit_rate_blanket);
    j["hit_rate_spot"] = opt(t.hit_rate_spot);
    j["usage_blanket_l_ha"] = opt(t.usage_blanket_l_ha);
    j["usage_spot_l_ha"] = opt(t.usage_spot_l_ha);
    j["efficacy"] = opt(t.efficacy);
    j["usage_reduction"] = opt(t.reduction);
    j["density_blanket"] = opt(t.density_blanket);
    j["density_spot"] = opt(t.density_spot);
    return j;
  };
  auto stat_to_json = [](const StatResult& s) {
    json j;
    j["statistic"] = s.statistic;
    j["degrees_of_freedom"] = s.degrees_of_freedom;
    j["p_value"] = s.p_value;
    return j;
  };

  json root;
  root["version"] = bundle.version;
  root["input_hash"] = bundle.input_hash_hex;
  root["seed"] = bundle.seed ? json(*bundle.seed) : json(nullptr);
  root["paper_compare"] = bundle.paper_compare;

  json trials = json::array();
  for (const TrialRow& t : bundle.trials) trials.push_back(trial_to_json(t));
  root["trials"] = trials;
  root["average"] = bundle.average ? trial_to_json(*bundle.average) : json(nullptr);

  if (bundle.usage_stats) {
    const UsageStatsBlock& s = *bundle.usage_stats;
    json stats;
    stats["spot_mean"] = s.spot_mean;
    stats["spot_sd"] = s.spot_sd;
    stats["spot_n"] = s.n_spot;
    stats["blanket_mean"] = s.blanket_mean;
    stats["blanket_sd"] = s.blanket_sd;
    stats["blanket_n"] = s.n_blanket;
    stats["welch"] = stat_to_json(s.welch);
    stats["paired"] = s.paired ? stat_to_json(*s.paired) : json(nullptr);
    stats["knockdown_spot_mean"] = opt(s.knockdown_spot_mean);
    stats["knockdown_spot_sd"] = opt(s.knockdown_spot_sd);
    stats["knockdown_spot_n"] = s.n_knockdown_spot;
    stats["knockdown_blanket_mean"] = opt(s.knockdown_blanket_mean);
    stats["knockdown_blanket_sd"] = opt(s.knockdown_blanket_sd);
    stats["knockdown_blanket_n"] = s.n_knockdown_blanket;
    stats["pearson_density_spot_usage"] = opt(s.pearson_density_spot_usage);
    root["usage_stats"] = stats;
  } else {
    root["usage_stats"] = nullptr;
  }

  if (bundle.water) {
    const WaterBlock& w = *bundle.water;
    json water;
    json rows = json::array();
    for (const WaterRow& r : w.rows) {
      json jr;
      jr["trial"] = r.trial;
      jr["ingredient"] = r.ingredient;
      jr["conc_blanket_ugl"] = r.conc_blanket_ugl;
      jr["conc_spot_ugl"] = r.conc_spot_ugl;
      jr["conc_reduction"] = r.conc_reduction;
      jr["load_blanket_g_ha"] = r.load_blanket_g_ha;
      jr["load_spot_g_ha"] = r.load_spot_g_ha;
      jr["load_reduction"] = r.load_reduction;
      rows.push_back(jr);
    }
    water["rows"] = rows;
    water["mean_conc_blanket_ugl"] = w.mean_conc_blanket_ugl;
    water["mean_conc_spot_ugl"] = w.mean_conc_spot_ugl;
    water["mean_load_blanket_g_ha"] = w.mean_load_blanket_g_ha;
    water["mean_load_spot_g_ha"] = w.mean_load_spot_g_ha;
    water["aggregate_concentration_reduction"] = w.aggregate.mean_concentration_reduction;
    water["aggregate_load_reduction"] = w.aggregate.mean_load_reduction;
    root["water"] = water;
  } else {
    root["water"] = nullptr;
  }

  if (bundle.paper_compare) {
    const PublishedStats ps = published_stats();
    json pub;
    json pub_trials = json::array();
    auto pub_trial_to_json = [](const PublishedTrial& t) {
      json j;
      j["trial"] = t.trial;
      j["hit_rate_blanket_pct"] = t.hit_blanket_pct ? json(*t.hit_blanket_pct) : json(nullptr);
      j["hit_rate_spot_pct"] = t.hit_spot_pct ? json(*t.hit_spot_pct) : json(nullptr);
      j["usage_blanket_l_ha"] = t.usage_blanket_l_ha;
      j["usage_spot_l_ha"] = t.usage_spot_l_ha;
      j["efficacy_pct"] = t.efficacy_pct ? json(*t.efficacy_pct) : json(nullptr);
      j["reduction_pct"] = t.reduction_pct;
      return j;
    };
    for (const PublishedTrial& t : published_trials()) pub_trials.push_back(pub_trial_to_json(t));
    pub["trials"] = pub_trials;
    pub["average"] = pub_trial_to_json(published_trial_average());
    json pub_water = json::array();
    auto pub_water_to_json = [](const PublishedWater& w) {
      json j;
      j["trial"] = w.trial;
      j["ingredient"] = w.ingredient;
      j["conc_blanket_ugl"] = w.conc_blanket_ugl;
      j["load_blanket_g_ha"] = w.load_blanket_g_ha;
      j["conc_spot_ugl"] = w.conc_spot_ugl;
      j["load_spot_g_ha"] = w.load_spot_g_ha;
      j["conc_reduction_pct"] = w.conc_reduction_pct;
      j["load_reduction_pct"] = w.load_reduction_pct;
      return j;
    };
    for (const PublishedWater& w : published_water()) pub_water.push_back(pub_water_to_json(w));
    pub["water"] = pub_water;
    pub["water_average"] = pub_water_to_json(published_water_average());
    json pub_stats;
    pub_stats["spot_usage_mean"] = ps.spot_usage_mean;
    pub_stats["spot_usage_sd"] = ps.spot_usage_sd;
    pub_stats["blanket_usage_mean"] = ps.blanket_usage_mean;
    pub_stats["blanket_usage_sd"] = ps.blanket_usage_sd;
    pub_stats["usage_t"] = ps.usage_t;
    pub_stats["usage_p"] = ps.usage_p;
    pub_stats["knockdown_spot_mean"] = ps.knockdown_spot_mean;
    pub_stats["knockdown_spot_sd"] = ps.knockdown_spot_sd;
    pub_stats["knockdown_blanket_mean"] = ps.knockdown_blanket_mean;
    pub_stats["knockdown_blanket_sd"] = ps.knockdown_blanket_sd;
    pub_stats["density_usage_r"] = ps.density_usage_r;
    pub["stats"] = pub_stats;
    root["published"] = pub;
  }

  root["notes"] = bundle.notes;
  return root.dump(2) + "\n";
}

void write_report_files(const std::string& dir, const ReportBundle& bundle, OutputFormat format) {
  write_text_file(dir + "/report.txt", render_report_text(bundle));
  if (format == OutputFormat::csv) {
    csv::write_table(dir + "/report_trials.csv", render_trials_table(bundle));
    csv::write_table(dir + "/report_stats.csv", render_stats_table(bundle));
    if (bundle.water) csv::write_table(dir + "/report_water.csv", render_water_table(bundle));
  } else {
    write_text_file(dir + "/report.json", render_report_json(bundle));
  }
}

}  // namespace spotspray
