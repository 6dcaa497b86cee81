#pragma once

#include "evacast/core/time.hpp"
#include "evacast/domain/hurricane.hpp"
#include "evacast/domain/network.hpp"
#include "evacast/features/spi.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace evacast::features {

inline constexpr int kFeatureSchemaVersion = 1;
inline constexpr int kEventPeriods = 28;
inline constexpr int kPeriodHours = 6;
inline constexpr int kEventHours = kEventPeriods * kPeriodHours;
inline constexpr int kHistoryDays = 7;
inline constexpr int kDefaultWindowLen = 24;

struct FeatureConfig {
    int utc_offset_hours = -6; // local clock for time-of-day / hour-of-day
    double zone_meridian_lon = domain::kDefaultZoneMeridian;
};

// The 7-day span from 3 days before the landfall day to the end of the third
// day after it, in 28 six-hour periods. Anchored at 00:00 UTC of the landfall day.
struct EventWindow {
    Timestamp start{};

    Timestamp period_start(int period_index) const { return start + Hours{kPeriodHours * period_index}; }
    Timestamp end() const { return start + Hours{kEventHours}; }
    // Period containing t, if t lies in the window.
    std::optional<int> period_of(Timestamp t) const;
};

EventWindow event_window(const domain::HurricaneEvent& h);
// First hour of the 7-day regular-speed window preceding the event window.
Timestamp history_start(const domain::HurricaneEvent& h);

// Long-term vector: one-hot direction (4) followed by the ten scalar features.
const std::vector<std::string>& longterm_feature_names();
// Short-term per-step vector: speed, hour_of_day, time_to_landfall, then the static block.
const std::vector<std::string>& shortterm_step_names();
inline constexpr std::size_t kLongTermWidth = 14;
inline constexpr std::size_t kShortTermWidth = 15;
inline constexpr std::size_t kSpeedColumn = 0;

// True for columns that normalization leaves untouched (the direction one-hot).
std::vector<bool> passthrough_mask(const std::vector<std::string>& names);

// Canonical names accept the aliases slots_to_landfall / hours_to_landfall
// for time_to_landfall. Returns nullopt for unknown names.
std::optional<std::string> canonical_feature_name(const std::string& name);

std::vector<double> longterm_features(const domain::RoadLink& link, const domain::HurricaneEvent& h,
                                      const RegularStats& stats, Timestamp period_start,
                                      const FeatureConfig& cfg = {});

// The static block broadcast onto every step of a short-term sequence.
std::vector<double> shortterm_static_features(const domain::RoadLink& link, const domain::HurricaneEvent& h,
                                              const RegularStats& stats);

// Full step vector at time t with observed speed.
std::vector<double> shortterm_step(double speed, Timestamp t, const domain::HurricaneEvent& h,
                                   const std::vector<double>& static_block, const FeatureConfig& cfg = {});

nlohmann::json feature_schema_json(const std::vector<std::string>& names);

} // namespace evacast::features
