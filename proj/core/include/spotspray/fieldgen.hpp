#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "spotspray/geometry.hpp"
#include "spotspray/rng.hpp"

namespace spotspray {

enum class Species : int { nutgrass = 0, grass = 1, broadleaf = 2 };
inline constexpr int kSpeciesCount = 3;

std::string_view to_string(Species species);
std::optional<Species> species_from_string(std::string_view name);

enum class Treatment : int { blanket = 0, spot = 1 };

std::string_view to_string(Treatment treatment);
std::optional<Treatment> treatment_from_string(std::string_view name);

struct WeedInstance {
  std::int64_t id = 0;
  Species species = Species::nutgrass;
  double along_m = 0.0;       // distance into the strip, direction of travel
  double cross_m = 0.0;       // absolute cross-track position in the trial
  double detectability = 1.0; // per-view visibility factor, (0, 1]
};

enum class Clustering : int { uniform_poisson = 0, thomas_cluster = 1 };

std::string_view to_string(Clustering clustering);
std::optional<Clustering> clustering_from_string(std::string_view name);

enum class DensityUnit : int { per_m2 = 0, per_image = 1 };

std::string_view to_string(DensityUnit unit);
std::optional<DensityUnit> density_unit_from_string(std::string_view name);

// Stochastic description of the weed population in one trial.
//
// For uniform_poisson the realized intensity is `target_density` (converted
// to weeds/m^2 when given per image). For thomas_cluster the intensity is
// parent_rate_per_m2 * mean_offspring by construction and `target_density`
// is not consulted; parents are drawn on the strip region buffered by 4
// cluster radii so edge clusters are not thinned.
struct FieldSpec {
  std::uint64_t seed = 0;
  double target_density = 0.1;
  DensityUnit density_unit = DensityUnit::per_m2;
  double image_area_m2 = 1.28;  // 1.6 m cross x 0.8 m along, used for per_image
  Clustering clustering = Clustering::uniform_poisson;
  double parent_rate_per_m2 = 0.0;
  double cluster_radius_m = 0.0;
  double mean_offspring = 0.0;
  std::array<double, kSpeciesCount> species_mix = {1.0, 0.0, 0.0};
  double detectability = 1.0;

  void validate() const;
  double intensity_per_m2() const;
};

struct Strip {
  Treatment treatment = Treatment::blanket;
  int rows_per_strip = 13;
  double area_ha = 0.0;
};

struct TrialLayout {
  std::vector<Strip> strips;
  double total_area_ha = 0.0;

  // Checks strict treatment alternation, positive areas and area sum.
  void validate() const;
  // Cross-track offset of the strip's left edge for the given row geometry.
  double strip_cross_offset_m(int strip_index, const RowLayout& rows) const;
};

// Side-by-side strips of strictly alternating treatment, starting with
// `first_treatment`; each strip covers rows_per_strip * row_width_m *
// strip_length_m. Throws DomainError for n_strips < 2 or non-positive
// dimensions.
TrialLayout layout_trial(int n_strips, int rows_per_strip, double row_width_m,
                         double strip_length_m, Treatment first_treatment);

// Draws one weed population covering every strip of the trial. Deterministic
// in spec.seed; strip populations come from per-strip substreams so changing
// the strip count does not reshuffle earlier strips. Weed ids are unique and
// assigned in generation order.
std::vector<WeedInstance> generate_field(const FieldSpec& spec, const TrialLayout& layout,
                                         const RowLayout& rows);

}  // namespace spotspray
