#pragma once

#include "evacast/domain/geo.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace evacast::domain {

enum class Direction : int { N = 0, S = 1, E = 2, W = 3 };

inline constexpr std::array<Direction, 4> kDirections{Direction::N, Direction::S, Direction::E, Direction::W};

std::string to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

// Unit vector (east, north) of travel for the direction.
std::array<double, 2> unit_vector(Direction d);

struct BoundingBox {
    double min_lat = 0.0;
    double max_lat = 0.0;
    double min_lon = 0.0;
    double max_lon = 0.0;

    bool contains(const GeoPoint& p) const;
    BoundingBox expanded(double margin_deg) const;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Louisiana evacuation-route extent used by the generator and the service.
inline constexpr BoundingBox kLouisianaBox{29.0, 33.0, -94.0, -89.0};

struct RoadLink {
    std::string link_id;
    GeoPoint centroid;
    std::vector<GeoPoint> geometry;
    Direction direction = Direction::N;
    int lanes = 1;
};

// Mean of the geometry vertices.
GeoPoint vertex_centroid(const std::vector<GeoPoint>& geometry);

class RoadNetwork {
public:
    // Validates every invariant: non-empty, unique ids, lanes >= 1,
    // geometry >= 2 valid points, centroid inside the geometry bounds.
    explicit RoadNetwork(std::vector<RoadLink> links);

    const std::vector<RoadLink>& links() const { return links_; }
    std::size_t size() const { return links_.size(); }
    const BoundingBox& bbox() const { return bbox_; }

    const RoadLink* find(const std::string& link_id) const;
    std::optional<std::size_t> index_of(const std::string& link_id) const;

private:
    std::vector<RoadLink> links_;
    std::unordered_map<std::string, std::size_t> index_;
    BoundingBox bbox_;
};

RoadNetwork parse_network(const std::string& geojson_text);
RoadNetwork load_network(const std::filesystem::path& path);

nlohmann::json network_to_geojson(const RoadNetwork& network);
void save_network(const RoadNetwork& network, const std::filesystem::path& path);

} // namespace evacast::domain
