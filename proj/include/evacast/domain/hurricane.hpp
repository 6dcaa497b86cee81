#pragma once

#include "evacast/core/time.hpp"
#include "evacast/domain/geo.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace evacast::domain {

struct HurricaneEvent {
    std::string name;
    int category = 1;
    Timestamp landfall_time{};
    GeoPoint landfall_point;
    LandfallZone landfall_zone = LandfallZone::West;
};

// category in [1,5], valid landfall point, zone consistent with the meridian rule.
void validate(const HurricaneEvent& h, double meridian_lon = kDefaultZoneMeridian);

// The five Louisiana landfalls of 2019-2021 (times UTC).
const std::vector<HurricaneEvent>& hurricane_presets();
std::optional<HurricaneEvent> find_preset(std::string_view name); // case-insensitive

// {name, category, landfall_time, landfall_lat, landfall_lon, landfall_zone}
nlohmann::json hurricane_to_json(const HurricaneEvent& h);
// landfall_zone is optional (0/1 or "West"/"East") and derived when absent.
HurricaneEvent hurricane_from_json(const nlohmann::json& j, double meridian_lon = kDefaultZoneMeridian);

HurricaneEvent load_hurricane(const std::filesystem::path& path, double meridian_lon = kDefaultZoneMeridian);
void save_hurricane(const HurricaneEvent& h, const std::filesystem::path& path);

} // namespace evacast::domain
