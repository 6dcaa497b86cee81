#include "evacast/features/schema.hpp"

#include <algorithm>

namespace evacast::features {

std::optional<int> EventWindow::period_of(Timestamp t) const {
    if (t < start || t >= end()) {
        return std::nullopt;
    }
    return static_cast<int>((t - start).count() / (kPeriodHours * 3600));
}

EventWindow event_window(const domain::HurricaneEvent& h) {
    return EventWindow{floor_to_day(h.landfall_time) - std::chrono::days{3}};
}

Timestamp history_start(const domain::HurricaneEvent& h) {
    return event_window(h).start - std::chrono::days{kHistoryDays};
}

const std::vector<std::string>& longterm_feature_names() {
    static const std::vector<std::string> names{
        "dir_N",     "dir_S",     "dir_E",     "dir_W",       "lanes",         "mean_7d",
        "std_7d",    "lat",       "lon",       "distance_to_landfall", "time_of_day", "time_to_landfall",
        "category",  "landfall_zone"};
    return names;
}

const std::vector<std::string>& shortterm_step_names() {
    static const std::vector<std::string> names{
        "speed", "hour_of_day", "time_to_landfall", "category", "landfall_zone", "lat",     "lon",
        "distance_to_landfall", "lanes", "dir_N", "dir_S", "dir_E", "dir_W",   "mean_7d", "std_7d"};
    return names;
}

std::vector<bool> passthrough_mask(const std::vector<std::string>& names) {
    std::vector<bool> mask(names.size(), false);
    for (std::size_t i = 0; i < names.size(); ++i) {
        mask[i] = names[i].rfind("dir_", 0) == 0;
    }
    return mask;
}

std::optional<std::string> canonical_feature_name(const std::string& name) {
    if (name == "slots_to_landfall" || name == "hours_to_landfall") {
        return std::string("time_to_landfall");
    }
    const auto& names = longterm_feature_names();
    if (std::find(names.begin(), names.end(), name) != names.end()) {
        return name;
    }
    return std::nullopt;
}

namespace {

void push_direction(std::vector<double>& v, domain::Direction d) {
    for (const auto candidate : domain::kDirections) {
        v.push_back(candidate == d ? 1.0 : 0.0);
    }
}

} // namespace

std::vector<double> longterm_features(const domain::RoadLink& link, const domain::HurricaneEvent& h,
                                      const RegularStats& stats, Timestamp period_start, const FeatureConfig& cfg) {
    std::vector<double> v;
    v.reserve(kLongTermWidth);
    push_direction(v, link.direction);
    v.push_back(static_cast<double>(link.lanes));
    v.push_back(stats.mean_7d);
    v.push_back(stats.std_7d);
    v.push_back(link.centroid.lat);
    v.push_back(link.centroid.lon);
    v.push_back(domain::haversine_km(link.centroid, h.landfall_point));
    v.push_back(static_cast<double>(time_of_day_slot(period_start, cfg.utc_offset_hours)));
    v.push_back(static_cast<double>(slots_to_landfall(period_start, h.landfall_time)));
    v.push_back(static_cast<double>(h.category));
    v.push_back(static_cast<double>(static_cast<int>(h.landfall_zone)));
    return v;
}

std::vector<double> shortterm_static_features(const domain::RoadLink& link, const domain::HurricaneEvent& h,
                                              const RegularStats& stats) {
    std::vector<double> v;
    v.reserve(kShortTermWidth - 3);
    v.push_back(static_cast<double>(h.category));
    v.push_back(static_cast<double>(static_cast<int>(h.landfall_zone)));
    v.push_back(link.centroid.lat);
    v.push_back(link.centroid.lon);
    v.push_back(domain::haversine_km(link.centroid, h.landfall_point));
    v.push_back(static_cast<double>(link.lanes));
    push_direction(v, link.direction);
    v.push_back(stats.mean_7d);
    v.push_back(stats.std_7d);
    return v;
}

std::vector<double> shortterm_step(double speed, Timestamp t, const domain::HurricaneEvent& h,
                                   const std::vector<double>& static_block, const FeatureConfig& cfg) {
    std::vector<double> v;
    v.reserve(3 + static_block.size());
    v.push_back(speed);
    v.push_back(static_cast<double>(local_hour_of_day(t, cfg.utc_offset_hours)));
    v.push_back(hours_between(h.landfall_time, t));
    v.insert(v.end(), static_block.begin(), static_block.end());
    return v;
}

nlohmann::json feature_schema_json(const std::vector<std::string>& names) {
    return {{"version", kFeatureSchemaVersion}, {"names", names}};
}

} // namespace evacast::features
