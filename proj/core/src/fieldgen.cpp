#include "spotspray/fieldgen.hpp"

#include <cmath>

#include "spotspray/units.hpp"

namespace spotspray {

std::string_view to_string(Species species) {
  switch (species) {
    case Species::nutgrass: return "nutgrass";
    case Species::grass: return "grass";
    case Species::broadleaf: return "broadleaf";
  }
  throw DomainError("to_string: unknown species");
}

std::optional<Species> species_from_string(std::string_view name) {
  if (name == "nutgrass") return Species::nutgrass;
  if (name == "grass") return Species::grass;
  if (name == "broadleaf") return Species::broadleaf;
  return std::nullopt;
}

std::string_view to_string(Treatment treatment) {
  switch (treatment) {
    case Treatment::blanket: return "blanket";
    case Treatment::spot: return "spot";
  }
  throw DomainError("to_string: unknown treatment");
}

std::optional<Treatment> treatment_from_string(std::string_view name) {
  if (name == "blanket") return Treatment::blanket;
  if (name == "spot") return Treatment::spot;
  return std::nullopt;
}

std::string_view to_string(Clustering clustering) {
  switch (clustering) {
    case Clustering::uniform_poisson: return "uniform_poisson";
    case Clustering::thomas_cluster: return "thomas_cluster";
  }
  throw DomainError("to_string: unknown clustering");
}

std::optional<Clustering> clustering_from_string(std::string_view name) {
  if (name == "uniform_poisson") return Clustering::uniform_poisson;
  if (name == "thomas_cluster") return Clustering::thomas_cluster;
  return std::nullopt;
}

std::string_view to_string(DensityUnit unit) {
  switch (unit) {
    case DensityUnit::per_m2: return "per_m2";
    case DensityUnit::per_image: return "per_image";
  }
  throw DomainError("to_string: unknown density unit");
}

std::optional<DensityUnit> density_unit_from_string(std::string_view name) {
  if (name == "per_m2") return DensityUnit::per_m2;
  if (name == "per_image") return DensityUnit::per_image;
  return std::nullopt;
}

void FieldSpec::validate() const {
  if (!(target_density >= 0.0)) throw DomainError("field: target_density must be >= 0");
  if (!(image_area_m2 > 0.0)) throw DomainError("field: image_area_m2 must be > 0");
  if (clustering == Clustering::thomas_cluster) {
    if (!(parent_rate_per_m2 > 0.0)) throw DomainError("field: parent_rate_per_m2 must be > 0");
    if (!(cluster_radius_m > 0.0)) throw DomainError("field: cluster_radius_m must be > 0");
    if (!(mean_offspring > 0.0)) throw DomainError("field: mean_offspring must be > 0");
  }
  double mix_sum = 0.0;
  for (double w : species_mix) {
    if (!(w >= 0.0)) throw DomainError("field: species_mix weights must be >= 0");
    mix_sum += w;
  }
  if (!(mix_sum > 0.0)) throw DomainError("field: species_mix must have positive total weight");
  if (!(detectability > 0.0 && detectability <= 1.0))
    throw DomainError("field: detectability must be in (0, 1]");
}

double FieldSpec::intensity_per_m2() const {
  if (clustering == Clustering::thomas_cluster) return parent_rate_per_m2 * mean_offspring;
  return density_unit == DensityUnit::per_image ? target_density / image_area_m2 : target_density;
}

void TrialLayout::validate() const {
  if (strips.empty()) throw DomainError("layout: at least one strip required");
  double area_sum = 0.0;
  for (std::size_t i = 0; i < strips.size(); ++i) {
    const Strip& s = strips[i];
    if (s.rows_per_strip < 1) throw DomainError("layout: rows_per_strip must be >= 1");
    if (!(s.area_ha > 0.0)) throw DomainError("layout: strip area must be > 0");
    if (i > 0 && s.treatment == strips[i - 1].treatment)
      throw DomainError("layout: treatments must strictly alternate");
    area_sum += s.area_ha;
  }
  if (std::fabs(area_sum - total_area_ha) > 1e-9 * (1.0 + total_area_ha))
    throw DomainError("layout: strip areas do not sum to total_area_ha");
}

double TrialLayout::strip_cross_offset_m(int strip_index, const RowLayout& rows) const {
  if (strip_index < 0 || strip_index >= static_cast<int>(strips.size()))
    throw DomainError("layout: strip index out of range");
  double offset_m = 0.0;
  for (int i = 0; i < strip_index; ++i) offset_m += strips[i].rows_per_strip * rows.row_width_m;
  return offset_m;
}

TrialLayout layout_trial(int n_strips, int rows_per_strip, double row_width_m,
                         double strip_length_m, Treatment first_treatment) {
  if (n_strips < 2) throw DomainError("layout_trial: n_strips must be >= 2");
  RowLayout rows{row_width_m, rows_per_strip, strip_length_m};
  rows.validate();
  TrialLayout layout;
  layout.strips.reserve(static_cast<std::size_t>(n_strips));
  for (int i = 0; i < n_strips; ++i) {
    Strip strip;
    const bool even = (i % 2) == 0;
    const bool first_is_blanket = first_treatment == Treatment::blanket;
    strip.treatment = (even == first_is_blanket) ? Treatment::blanket : Treatment::spot;
    strip.rows_per_strip = rows_per_strip;
    strip.area_ha = rows.strip_area_ha();
    layout.total_area_ha += strip.area_ha;
    layout.strips.push_back(strip);
  }
  return layout;
}

namespace {

Species pick_species(const std::array<double, kSpeciesCount>& mix, RngStream& rng) {
  double total = 0.0;
  for (double w : mix) total += w;
  double u = rng.uniform01() * total;
  for (int i = 0; i < kSpeciesCount; ++i) {
    u -= mix[i];
    if (u < 0.0) return static_cast<Species>(i);
  }
  return static_cast<Species>(kSpeciesCount - 1);  // u == total after rounding
}

void append_weed(std::vector<WeedInstance>& out, std::int64_t& next_id, const FieldSpec& spec,
                 double along_m, double cross_m, RngStream& rng) {
  WeedInstance weed;
  weed.id = next_id++;
  weed.species = pick_species(spec.species_mix, rng);
  weed.along_m = along_m;
  weed.cross_m = cross_m;
  weed.detectability = spec.detectability;
  out.push_back(weed);
}

}  // namespace

std::vector<WeedInstance> generate_field(const FieldSpec& spec, const TrialLayout& layout,
                                         const RowLayout& rows) {
  spec.validate();
  layout.validate();
  rows.validate();

  const double length_m = rows.strip_length_m;
  const RngStream root = RngStream::from_seed(spec.seed);
  std::vector<WeedInstance> field;
  std::int64_t next_id = 0;

  for (int s = 0; s < static_cast<int>(layout.strips.size()); ++s) {
    const Strip& strip = layout.strips[s];
    const double width_m = strip.rows_per_strip * rows.row_width_m;
    const double offset_m = layout.strip_cross_offset_m(s, rows);
    RngStream rng = root.substream(static_cast<std::uint64_t>(s));

    if (spec.clustering == Clustering::uniform_poisson) {
      const double mean_count = spec.intensity_per_m2() * width_m * length_m;
      const std::uint64_t count = rng.poisson(mean_count);
      for (std::uint64_t k = 0; k < count; ++k) {
        const double along_m = rng.uniform(0.0, length_m);
        const double cross_m = offset_m + rng.uniform(0.0, width_m);
        append_weed(field, next_id, spec, along_m, cross_m, rng);
      }
    } else {
      // Parents live on the strip buffered by 4 cluster radii so clusters
      // centred just outside still scatter offspring into the strip.
      const double buffer_m = 4.0 * spec.cluster_radius_m;
      const double buf_length_m = length_m + 2.0 * buffer_m;
      const double buf_width_m = width_m + 2.0 * buffer_m;
      const std::uint64_t parents = rng.poisson(spec.parent_rate_per_m2 * buf_length_m * buf_width_m);
      for (std::uint64_t p = 0; p < parents; ++p) {
        const double parent_along_m = rng.uniform(-buffer_m, length_m + buffer_m);
        const double parent_cross_m = offset_m + rng.uniform(-buffer_m, width_m + buffer_m);
        const std::uint64_t offspring = rng.poisson(spec.mean_offspring);
        for (std::uint64_t k = 0; k < offspring; ++k) {
          const double along_m = parent_along_m + rng.normal(0.0, spec.cluster_radius_m);
          const double cross_m = parent_cross_m + rng.normal(0.0, spec.cluster_radius_m);
          if (along_m < 0.0 || along_m >= length_m) continue;
          if (cross_m < offset_m || cross_m >= offset_m + width_m) continue;
          append_weed(field, next_id, spec, along_m, cross_m, rng);
        }
      }
    }
  }
  return field;
}

}  // namespace spotspray
