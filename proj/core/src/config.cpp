#include "spotspray/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spotspray/units.hpp"

namespace spotspray {

void GeoOrigin::validate() const {
  if (!(origin_lat >= -90.0 && origin_lat <= 90.0))
    throw ConfigError("geo: origin_lat must be in [-90, 90]");
  if (!(origin_lon >= -180.0 && origin_lon <= 180.0))
    throw ConfigError("geo: origin_lon must be in [-180, 180]");
  if (!std::isfinite(heading_deg)) throw ConfigError("geo: heading_deg must be finite");
}

double RunConfig::effective_spray_duration_ms() const {
  if (spray_duration_ms > 0.0) return spray_duration_ms;
  // Hold the sprayed section length constant across speeds.
  return s_to_ms(section_length_m / kmh_to_mps(speed_kmh));
}

double RunConfig::effective_flow_rate_lps() const {
  if (flow_rate_lps > 0.0) return flow_rate_lps;
  // A nozzle waters one tile width; continuous operation must land the
  // blanket application rate: L/ha * m * m/s / (m^2/ha) = L/s.
  const double tile_width_m = grid.tile_width_m(0);
  return application_rate_l_ha * tile_width_m * kmh_to_mps(speed_kmh) / kM2PerHa;
}

void RunConfig::validate() const {
  field.validate();
  rows.validate();
  camera.validate();
  grid.validate();
  detector.validate();
  latency.validate();
  if (n_strips < 2) throw ConfigError("trial: strips must be >= 2");
  if (!(speed_kmh > 0.0)) throw ConfigError("vehicle: speed_kmh must be > 0");
  if (!(section_length_m > 0.0)) throw ConfigError("spray: section_length_m must be > 0");
  if (spray_duration_ms < 0.0) throw ConfigError("spray: duration_ms must be >= 0");
  if (flow_rate_lps < 0.0) throw ConfigError("spray: flow_rate_lps must be >= 0");
  if (!(application_rate_l_ha > 0.0))
    throw ConfigError("spray: application_rate_l_ha must be > 0");
  if (grid.span_m() > camera.cross_footprint_m() + 1e-9)
    throw ConfigError("tiles: span_m exceeds the camera field of view");
  if (geo) geo->validate();
  if (runoff_fraction && !(*runoff_fraction >= 0.0 && *runoff_fraction <= 1.0))
    throw ConfigError("runoff: fraction must be in [0, 1]");
  if (runoff_volume_l_ha && !(*runoff_volume_l_ha > 0.0))
    throw ConfigError("runoff: volume_l_ha must be > 0");
  if (runoff_fraction.has_value() != runoff_volume_l_ha.has_value())
    throw ConfigError("runoff: fraction and volume_l_ha must be set together");
  if (out_dir.empty()) throw ConfigError("output: dir must not be empty");
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char byte : bytes) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hash_hex(std::uint64_t hash) {
  static const char* digits = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 15; i >= 0; --i) {
    hex[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return hex;
}

namespace {

struct ConfigValue {
  std::string value;
  std::size_t line = 0;
  mutable bool used = false;
};

using Section = std::map<std::string, ConfigValue>;

struct ParsedConfig {
  std::string path;
  std::map<std::string, Section> sections;
  std::map<std::string, std::size_t> section_lines;
};

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) ++begin;
  while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r')) --end;
  return s.substr(begin, end - begin);
}

std::string where(const ParsedConfig& cfg, std::size_t line) {
  return cfg.path + ":" + std::to_string(line);
}

ParsedConfig parse_config_text(const std::string& path, const std::string& text) {
  ParsedConfig cfg;
  cfg.path = path;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::string current;
  while (std::getline(in, raw)) {
    line_no += 1;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where(cfg, line_no) + ": malformed section header '" + line + "'");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ConfigError(where(cfg, line_no) + ": empty section name");
      cfg.sections[current];  // a section may be empty
      cfg.section_lines.emplace(current, line_no);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where(cfg, line_no) + ": expected 'key = value', got '" + line + "'");
    if (current.empty())
      throw ConfigError(where(cfg, line_no) + ": key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where(cfg, line_no) + ": empty key");
    auto [it, inserted] = cfg.sections[current].emplace(key, ConfigValue{value, line_no});
    if (!inserted)
      throw ConfigError(where(cfg, line_no) + ": duplicate key '" + key + "' (first at line " +
                        std::to_string(it->second.line) + ")");
  }
  return cfg;
}

class Reader {
 public:
  Reader(const ParsedConfig& cfg, const std::string& section) : cfg_(cfg), section_(section) {}

  bool section_present() const { return cfg_.sections.count(section_) > 0; }

  const ConfigValue* find(const std::string& key) const {
    const auto sec = cfg_.sections.find(section_);
    if (sec == cfg_.sections.end()) return nullptr;
    const auto it = sec->second.find(key);
    if (it == sec->second.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  std::string context(const ConfigValue& v, const std::string& key) const {
    return where(cfg_, v.line) + ": [" + section_ + "] " + key;
  }

  double get_double(const std::string& key, double fallback) const {
    const ConfigValue* v = find(key);
    if (!v) return fallback;
    return parse_double(*v, key);
  }

  std::optional<double> get_optional_double(const std::string& key) const {
    const ConfigValue* v = find(key);
    if (!v) return std::nullopt;
    return parse_double(*v, key);
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    const ConfigValue* v = find(key);
    if (!v) return fallback;
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->value.data(), v->value.data() + v->value.size(), out);
    if (ec != std::errc() || ptr != v->value.data() + v->value.size())
      throw ConfigError(context(*v, key) + ": cannot parse '" + v->value + "' as an integer");
    return out;
  }

  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback, bool* present = nullptr) const {
    const ConfigValue* v = find(key);
    if (present) *present = v != nullptr;
    if (!v) return fallback;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->value.data(), v->value.data() + v->value.size(), out);
    if (ec != std::errc() || ptr != v->value.data() + v->value.size())
      throw ConfigError(context(*v, key) + ": cannot parse '" + v->value +
                        "' as an unsigned integer");
    return out;
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const ConfigValue* v = find(key);
    return v ? v->value : fallback;
  }

 private:
  double parse_double(const ConfigValue& v, const std::string& key) const {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.value.data(), v.value.data() + v.value.size(), out);
    if (ec != std::errc() || ptr != v.value.data() + v.value.size())
      throw ConfigError(context(v, key) + ": cannot parse '" + v.value + "' as a number");
    return out;
  }

  const ParsedConfig& cfg_;
  std::string section_;
};

void reject_unknown(const ParsedConfig& cfg, const std::set<std::string>& known_sections) {
  for (const auto& [name, section] : cfg.sections) {
    if (!known_sections.count(name))
      throw ConfigError(where(cfg, cfg.section_lines.at(name)) + ": unknown section [" + name +
                        "]");
    for (const auto& [key, value] : section) {
      if (!value.used)
        throw ConfigError(where(cfg, value.line) + ": unknown key '" + key + "' in [" + name +
                          "]");
    }
  }
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const ParsedConfig cfg = parse_config_text(path, text);
  RunConfig run;
  run.config_hash = fnv1a64(text);

  {
    Reader r(cfg, "run");
    bool seed_present = false;
    run.seed = r.get_uint("seed", 0, &seed_present);
    if (!seed_present)
      throw ConfigError(path + ": [run] seed is required (runs never seed from the clock)");
  }
  {
    Reader r(cfg, "field");
    run.field.seed = run.seed;
    run.field.target_density = r.get_double("density", run.field.target_density);
    const std::string unit = r.get_string("density_unit", "per_m2");
    const auto parsed_unit = density_unit_from_string(unit);
    if (!parsed_unit)
      throw ConfigError(path + ": [field] density_unit: unknown unit '" + unit + "'");
    run.field.density_unit = *parsed_unit;
    run.field.image_area_m2 = r.get_double("image_area_m2", run.field.image_area_m2);
    const std::string clustering = r.get_string("clustering", "uniform_poisson");
    const auto parsed_clustering = clustering_from_string(clustering);
    if (!parsed_clustering)
      throw ConfigError(path + ": [field] clustering: unknown mode '" + clustering + "'");
    run.field.clustering = *parsed_clustering;
    run.field.parent_rate_per_m2 = r.get_double("parent_rate_per_m2", 0.0);
    run.field.cluster_radius_m = r.get_double("cluster_radius_m", 0.0);
    run.field.mean_offspring = r.get_double("mean_offspring", 0.0);
    run.field.species_mix[0] = r.get_double("mix_nutgrass", 1.0);
    run.field.species_mix[1] = r.get_double("mix_grass", 0.0);
    run.field.species_mix[2] = r.get_double("mix_broadleaf", 0.0);
    run.field.detectability = r.get_double("detectability", 1.0);
  }
  {
    Reader r(cfg, "trial");
    run.n_strips = static_cast<int>(r.get_int("strips", run.n_strips));
    run.rows.rows_per_strip = static_cast<int>(r.get_int("rows_per_strip", run.rows.rows_per_strip));
    run.rows.row_width_m = r.get_double("row_width_m", run.rows.row_width_m);
    run.rows.strip_length_m = r.get_double("strip_length_m", run.rows.strip_length_m);
    const std::string first = r.get_string("first_treatment", "blanket");
    const auto parsed = treatment_from_string(first);
    if (!parsed)
      throw ConfigError(path + ": [trial] first_treatment: unknown treatment '" + first + "'");
    run.first_treatment = *parsed;
  }
  {
    Reader r(cfg, "camera");
    run.camera.mount_height_m = r.get_double("mount_height_m", run.camera.mount_height_m);
    run.camera.lens_angle_deg = r.get_double("lens_angle_deg", run.camera.lens_angle_deg);
    run.camera.along_footprint_m = r.get_double("along_footprint_m", run.camera.along_footprint_m);
    run.camera.frame_period_ms = r.get_double("frame_period_ms", run.camera.frame_period_ms);
  }
  {
    Reader r(cfg, "tiles");
    const std::int64_t per_camera = r.get_int("per_camera", 2);
    if (per_camera != 2)
      throw ConfigError(path + ": [tiles] per_camera: the layout is fixed at 2 tiles per camera");
    run.grid = TileGrid::centered(r.get_double("span_m", 1.6));
  }
  {
    Reader r(cfg, "detector");
    const std::optional<double> tpr_all = r.get_optional_double("tpr");
    if (tpr_all) run.detector.true_positive_rate = {*tpr_all, *tpr_all, *tpr_all};
    run.detector.true_positive_rate[0] =
        r.get_double("tpr_nutgrass", run.detector.true_positive_rate[0]);
    run.detector.true_positive_rate[1] =
        r.get_double("tpr_grass", run.detector.true_positive_rate[1]);
    run.detector.true_positive_rate[2] =
        r.get_double("tpr_broadleaf", run.detector.true_positive_rate[2]);
    run.detector.false_positive_rate = r.get_double("fpr", run.detector.false_positive_rate);
    run.detector.degradation_event_probability =
        r.get_double("degradation_probability", run.detector.degradation_event_probability);
    run.detector.degradation_tpr_multiplier =
        r.get_double("degradation_tpr_multiplier", run.detector.degradation_tpr_multiplier);
  }
  {
    Reader r(cfg, "latency");
    auto stage = [&](const std::string& name, LatencyStage& out) {
      out.mean_ms = r.get_double(name + "_mean_ms", out.mean_ms);
      out.sd_ms = r.get_double(name + "_sd_ms", out.sd_ms);
    };
    stage("acquisition", run.latency.acquisition);
    stage("preprocessing", run.latency.preprocessing);
    stage("inference", run.latency.inference);
    stage("solenoid", run.latency.solenoid);
  }
  {
    Reader r(cfg, "vehicle");
    run.speed_kmh = r.get_double("speed_kmh", run.speed_kmh);
  }
  {
    Reader r(cfg, "spray");
    run.spray_duration_ms = r.get_double("duration_ms", 0.0);
    run.section_length_m = r.get_double("section_length_m", run.section_length_m);
    run.flow_rate_lps = r.get_double("flow_rate_lps", 0.0);
    run.application_rate_l_ha = r.get_double("application_rate_l_ha", run.application_rate_l_ha);
  }
  {
    Reader r(cfg, "geo");
    if (r.section_present()) {
      GeoOrigin geo;
      const std::optional<double> lat = r.get_optional_double("origin_lat");
      const std::optional<double> lon = r.get_optional_double("origin_lon");
      if (!lat || !lon)
        throw ConfigError(path + ": [geo] requires origin_lat and origin_lon");
      geo.origin_lat = *lat;
      geo.origin_lon = *lon;
      geo.heading_deg = r.get_double("heading_deg", 0.0);
      run.geo = geo;
    }
  }
  {
    Reader r(cfg, "runoff");
    run.runoff_fraction = r.get_optional_double("fraction");
    run.runoff_volume_l_ha = r.get_optional_double("volume_l_ha");
  }
  {
    Reader r(cfg, "output");
    run.out_dir = r.get_string("dir", run.out_dir);
  }

  reject_unknown(cfg, {"run", "field", "trial", "camera", "tiles", "detector", "latency",
                       "vehicle", "spray", "geo", "runoff", "output"});
  run.validate();
  return run;
}

}  // namespace spotspray
