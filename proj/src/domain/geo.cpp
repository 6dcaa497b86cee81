#include "evacast/domain/geo.hpp"

#include "evacast/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace evacast::domain {

bool is_valid(const GeoPoint& p) {
    return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
           p.lon >= -180.0 && p.lon <= 180.0;
}

void validate(const GeoPoint& p, const std::string& what) {
    if (!is_valid(p)) {
        throw ValidationError(what + ": coordinate out of range (lat " + std::to_string(p.lat) + ", lon " +
                              std::to_string(p.lon) + ")");
    }
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double phi1 = a.lat * deg;
    const double phi2 = b.lat * deg;
    const double dphi = (b.lat - a.lat) * deg;
    const double dlambda = (b.lon - a.lon) * deg;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    const double h = std::clamp(s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2, 0.0, 1.0);
    return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

LandfallZone derive_landfall_zone(const GeoPoint& landfall, double meridian_lon) {
    return landfall.lon < meridian_lon ? LandfallZone::West : LandfallZone::East;
}

std::string to_string(LandfallZone zone) {
    return zone == LandfallZone::West ? "West" : "East";
}

} // namespace evacast::domain
