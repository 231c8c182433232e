#pragma once

#include <string_view>

namespace spotspray {

inline constexpr std::string_view kVersion = "0.1.0";

// All unit conversions used by the library live here so that the conversion
// factors are written exactly once.
inline constexpr double kMpsPerKmh = 1000.0 / 3600.0;
inline constexpr double kM2PerHa = 10000.0;
inline constexpr double kUgPerG = 1.0e6;
inline constexpr double kLPerM3 = 1000.0;

constexpr double kmh_to_mps(double speed_kmh) { return speed_kmh * kMpsPerKmh; }
constexpr double mps_to_kmh(double speed_mps) { return speed_mps / kMpsPerKmh; }
constexpr double ms_to_s(double t_ms) { return t_ms / 1000.0; }
constexpr double s_to_ms(double t_s) { return t_s * 1000.0; }
constexpr double min_to_s(double t_min) { return t_min * 60.0; }
constexpr double m2_to_ha(double area_m2) { return area_m2 / kM2PerHa; }
constexpr double ha_to_m2(double area_ha) { return area_ha * kM2PerHa; }
constexpr double mm_to_m(double x_mm) { return x_mm / 1000.0; }
constexpr double m_to_mm(double x_m) { return x_m * 1000.0; }
constexpr double ug_to_g(double mass_ug) { return mass_ug / kUgPerG; }

}  // namespace spotspray
