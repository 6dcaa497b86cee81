#include "evacast/domain/hurricane.hpp"

#include "evacast/core/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace evacast::domain {

using nlohmann::json;

void validate(const HurricaneEvent& h, double meridian_lon) {
    if (h.category < 1 || h.category > 5) {
        throw ValidationError("hurricane " + h.name + ": category must be in [1,5]");
    }
    validate(h.landfall_point, "hurricane " + h.name + " landfall");
    if (h.landfall_zone != derive_landfall_zone(h.landfall_point, meridian_lon)) {
        throw ValidationError("hurricane " + h.name + ": landfall_zone " + to_string(h.landfall_zone) +
                              " inconsistent with landfall longitude");
    }
}

namespace {

HurricaneEvent preset(const char* name, int category, const char* time, double lat, double lon) {
    HurricaneEvent h{name, category, parse_timestamp(time), GeoPoint{lat, lon}, LandfallZone::West};
    h.landfall_zone = derive_landfall_zone(h.landfall_point);
    return h;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

} // namespace

const std::vector<HurricaneEvent>& hurricane_presets() {
    static const std::vector<HurricaneEvent> presets{
        preset("ida", 4, "2021-08-29T16:55:00Z", 29.1, -90.2),
        preset("delta", 4, "2020-10-09T23:00:00Z", 29.8, -93.1),
        preset("laura", 4, "2020-08-27T06:00:00Z", 29.8, -93.3),
        preset("zeta", 3, "2020-10-28T21:00:00Z", 29.2, -90.6),
        preset("barry", 1, "2019-07-13T15:00:00Z", 29.6, -92.2),
    };
    return presets;
}

std::optional<HurricaneEvent> find_preset(std::string_view name) {
    const std::string key = lower(name);
    for (const auto& h : hurricane_presets()) {
        if (h.name == key) {
            return h;
        }
    }
    return std::nullopt;
}

json hurricane_to_json(const HurricaneEvent& h) {
    return {{"name", h.name},
            {"category", h.category},
            {"landfall_time", format_timestamp(h.landfall_time)},
            {"landfall_lat", h.landfall_point.lat},
            {"landfall_lon", h.landfall_point.lon},
            {"landfall_zone", static_cast<int>(h.landfall_zone)}};
}

HurricaneEvent hurricane_from_json(const json& j, double meridian_lon) {
    if (!j.is_object()) {
        throw ParseError("hurricane description must be a JSON object");
    }
    for (const char* key : {"name", "category", "landfall_time", "landfall_lat", "landfall_lon"}) {
        if (!j.contains(key)) {
            throw ValidationError(std::string("hurricane: missing required field '") + key + "'");
        }
    }
    HurricaneEvent h;
    try {
        h.name = j.at("name").get<std::string>();
        h.category = j.at("category").get<int>();
        h.landfall_time = parse_timestamp(j.at("landfall_time").get<std::string>());
        h.landfall_point = GeoPoint{j.at("landfall_lat").get<double>(), j.at("landfall_lon").get<double>()};
    } catch (const json::type_error& e) {
        throw ValidationError(std::string("hurricane: field has wrong type: ") + e.what());
    }
    const LandfallZone derived = derive_landfall_zone(h.landfall_point, meridian_lon);
    h.landfall_zone = derived;
    if (j.contains("landfall_zone") && !j.at("landfall_zone").is_null()) {
        const json& z = j.at("landfall_zone");
        if (z.is_number_integer()) {
            const int code = z.get<int>();
            if (code != 0 && code != 1) {
                throw ValidationError("hurricane " + h.name + ": landfall_zone must be 0 (West) or 1 (East)");
            }
            h.landfall_zone = static_cast<LandfallZone>(code);
        } else if (z.is_string()) {
            const std::string s = lower(z.get<std::string>());
            if (s != "west" && s != "east") {
                throw ValidationError("hurricane " + h.name + ": landfall_zone must be West or East");
            }
            h.landfall_zone = s == "west" ? LandfallZone::West : LandfallZone::East;
        } else {
            throw ValidationError("hurricane " + h.name + ": landfall_zone has wrong type");
        }
    }
    validate(h, meridian_lon);
    return h;
}

HurricaneEvent load_hurricane(const std::filesystem::path& path, double meridian_lon) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open hurricane file " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError("hurricane file " + path.string() + " malformed: " + e.what());
    }
    return hurricane_from_json(j, meridian_lon);
}

void save_hurricane(const HurricaneEvent& h, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write hurricane file " + path.string());
    }
    out << hurricane_to_json(h).dump(2) << '\n';
}

} // namespace evacast::domain
