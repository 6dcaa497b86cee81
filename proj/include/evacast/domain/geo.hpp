#pragma once

#include <string>

namespace evacast::domain {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kDefaultZoneMeridian = -91.0;
inline constexpr double kKmPerMile = 1.609344;

struct GeoPoint {
    double lat = 0.0; // degrees
    double lon = 0.0; // degrees

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

// Throws ValidationError naming `what` if the point is out of range.
void validate(const GeoPoint& p, const std::string& what);

// Great-circle distance on a sphere of radius kEarthRadiusKm.
double haversine_km(const GeoPoint& a, const GeoPoint& b);

enum class LandfallZone : int { West = 0, East = 1 };

// West if landfall.lon < meridian_lon, East otherwise (the meridian itself is East).
LandfallZone derive_landfall_zone(const GeoPoint& landfall, double meridian_lon = kDefaultZoneMeridian);

std::string to_string(LandfallZone zone);

} // namespace evacast::domain
