#pragma once
// Skin-colour coordinates derived from CIELAB (L*, a*, b*).

#include <cmath>
#include <numbers>

#include "fairgroups/core.hpp"

namespace fairgroups {

inline constexpr double kDegreesPerRadian = 180.0 / std::numbers::pi;

// Individual typology angle in degrees, in (-90, 90).
inline double lab_to_ita(double lightness, double b) {
    if (b == 0.0) throw DomainError("ITA is undefined for b* = 0");
    return std::atan((lightness - 50.0) / b) * kDegreesPerRadian;
}

// Hue angle in degrees, in [0, 360). Skin undertones sit in [0, 90].
inline double lab_to_hue(double a, double b) {
    if (a == 0.0 && b == 0.0) throw DomainError("hue is undefined for a* = b* = 0");
    double h = std::atan2(b, a) * kDegreesPerRadian;
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    return h;
}

}  // namespace fairgroups
