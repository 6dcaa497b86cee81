#include "evacast/domain/network.hpp"

#include "evacast/core/error.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

namespace evacast::domain {

using nlohmann::json;

std::string to_string(Direction d) {
    switch (d) {
    case Direction::N: return "N";
    case Direction::S: return "S";
    case Direction::E: return "E";
    case Direction::W: return "W";
    }
    return "?";
}

std::optional<Direction> parse_direction(std::string_view s) {
    if (s == "N") return Direction::N;
    if (s == "S") return Direction::S;
    if (s == "E") return Direction::E;
    if (s == "W") return Direction::W;
    return std::nullopt;
}

std::array<double, 2> unit_vector(Direction d) {
    switch (d) {
    case Direction::N: return {0.0, 1.0};
    case Direction::S: return {0.0, -1.0};
    case Direction::E: return {1.0, 0.0};
    case Direction::W: return {-1.0, 0.0};
    }
    return {0.0, 0.0};
}

bool BoundingBox::contains(const GeoPoint& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
}

BoundingBox BoundingBox::expanded(double margin_deg) const {
    return {min_lat - margin_deg, max_lat + margin_deg, min_lon - margin_deg, max_lon + margin_deg};
}

GeoPoint vertex_centroid(const std::vector<GeoPoint>& geometry) {
    GeoPoint c{0.0, 0.0};
    if (geometry.empty()) {
        return c;
    }
    for (const auto& p : geometry) {
        c.lat += p.lat;
        c.lon += p.lon;
    }
    c.lat /= static_cast<double>(geometry.size());
    c.lon /= static_cast<double>(geometry.size());
    return c;
}

RoadNetwork::RoadNetwork(std::vector<RoadLink> links) : links_(std::move(links)) {
    if (links_.empty()) {
        throw ValidationError("road network has no links");
    }
    std::vector<std::string> duplicates;
    bbox_ = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const RoadLink& link = links_[i];
        if (link.link_id.empty()) {
            throw ValidationError("link at index " + std::to_string(i) + " has an empty link_id");
        }
        if (!index_.emplace(link.link_id, i).second) {
            if (std::find(duplicates.begin(), duplicates.end(), link.link_id) == duplicates.end()) {
                duplicates.push_back(link.link_id);
            }
            continue;
        }
        if (link.lanes < 1) {
            throw ValidationError("link " + link.link_id + ": lanes must be >= 1");
        }
        if (link.geometry.size() < 2) {
            throw ValidationError("link " + link.link_id + ": geometry needs at least 2 points");
        }
        BoundingBox own{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (const auto& p : link.geometry) {
            validate(p, "link " + link.link_id);
            own.min_lat = std::min(own.min_lat, p.lat);
            own.max_lat = std::max(own.max_lat, p.lat);
            own.min_lon = std::min(own.min_lon, p.lon);
            own.max_lon = std::max(own.max_lon, p.lon);
        }
        constexpr double tol = 1e-9;
        if (!own.expanded(tol).contains(link.centroid)) {
            throw ValidationError("link " + link.link_id + ": centroid outside geometry bounds");
        }
        bbox_.min_lat = std::min(bbox_.min_lat, own.min_lat);
        bbox_.max_lat = std::max(bbox_.max_lat, own.max_lat);
        bbox_.min_lon = std::min(bbox_.min_lon, own.min_lon);
        bbox_.max_lon = std::max(bbox_.max_lon, own.max_lon);
    }
    if (!duplicates.empty()) {
        std::string msg = "duplicate link_id:";
        for (const auto& d : duplicates) {
            msg += " " + d;
        }
        throw ValidationError(msg);
    }
}

const RoadLink* RoadNetwork::find(const std::string& link_id) const {
    const auto it = index_.find(link_id);
    return it == index_.end() ? nullptr : &links_[it->second];
}

std::optional<std::size_t> RoadNetwork::index_of(const std::string& link_id) const {
    const auto it = index_.find(link_id);
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

namespace {

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
    return 1 + static_cast<std::size_t>(std::count(text.begin(), end, '\n'));
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) {
        throw ValidationError(where + ": missing required property '" + key + "'");
    }
    return obj.at(key);
}

} // namespace

RoadNetwork parse_network(const std::string& geojson_text) {
    json doc;
    try {
        doc = json::parse(geojson_text);
    } catch (const json::parse_error& e) {
        throw ParseError("network GeoJSON malformed at line " + std::to_string(line_of_byte(geojson_text, e.byte)) +
                         ": " + e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
        !doc["features"].is_array()) {
        throw ParseError("network file is not a GeoJSON FeatureCollection");
    }
    std::vector<RoadLink> links;
    links.reserve(doc["features"].size());
    std::size_t index = 0;
    for (const json& feature : doc["features"]) {
        const std::string where = "feature " + std::to_string(index++);
        const json& geom = require(feature, "geometry", where);
        if (geom.value("type", "") != "LineString") {
            throw ValidationError(where + ": geometry must be a LineString");
        }
        const json& coords = require(geom, "coordinates", where);
        const json& props = require(feature, "properties", where);
        RoadLink link;
        try {
            link.link_id = require(props, "link_id", where).get<std::string>();
            const std::string tag = where + " (" + link.link_id + ")";
            link.lanes = require(props, "lanes", tag).get<int>();
            const auto dir = parse_direction(require(props, "direction", tag).get<std::string>());
            if (!dir) {
                throw ValidationError(tag + ": property 'direction' must be one of N, S, E, W");
            }
            link.direction = *dir;
            for (const json& c : coords) {
                if (!c.is_array() || c.size() < 2) {
                    throw ValidationError(tag + ": coordinate must be [lon, lat]");
                }
                link.geometry.push_back(GeoPoint{c[1].get<double>(), c[0].get<double>()});
            }
        } catch (const json::type_error& e) {
            throw ValidationError(where + ": property has wrong type: " + e.what());
        }
        link.centroid = vertex_centroid(link.geometry);
        links.push_back(std::move(link));
    }
    return RoadNetwork(std::move(links));
}

RoadNetwork load_network(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open network file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

json network_to_geojson(const RoadNetwork& network) {
    json features = json::array();
    for (const auto& link : network.links()) {
        json coords = json::array();
        for (const auto& p : link.geometry) {
            coords.push_back({p.lon, p.lat});
        }
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                            {"properties",
                             {{"link_id", link.link_id},
                              {"lanes", link.lanes},
                              {"direction", to_string(link.direction)}}}});
    }
    return {{"type", "FeatureCollection"}, {"features", features}};
}

void save_network(const RoadNetwork& network, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write network file " + path.string());
    }
    out << network_to_geojson(network).dump(1) << '\n';
}

} // namespace evacast::domain
