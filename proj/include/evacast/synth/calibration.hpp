#pragma once

#include "evacast/domain/evacuation_data.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace evacast::synth {

inline constexpr double kNearbyKm = 50.0 * 1.609344;
inline constexpr int kCalibrationDays = 4; // day 0 (landfall day) .. day 3 before

// Published anchors for day k before landfall (index k).
inline constexpr std::array<double, kCalibrationDays> kNearbyChangePct{-20.9, -25.6, -5.2, -0.7};
inline constexpr std::array<double, kCalibrationDays> kDistantChangePct{-18.7, -21.2, -3.7, -0.5};
inline constexpr std::array<double, 3> kNearbyDurationH{3.1, 6.2, 0.5};
inline constexpr std::array<double, 3> kDistantDurationH{2.6, 4.7, 0.3};
inline constexpr double kChangeTolPts = 4.0;
inline constexpr double kDurationTolH = 1.5;

struct ClassCalibration {
    std::size_t n_links = 0;          // links in the distance class
    std::size_t n_population = 0;     // links averaged over
    bool impacted_only = true;        // false when no link of the class is impacted
    std::array<double, kCalibrationDays> change_pct{};
    std::array<double, kCalibrationDays> duration_h{};
};

struct CalibrationReport {
    ClassCalibration nearby;
    ClassCalibration distant;
    bool pass = false;
    std::vector<std::string> failures;
};

// Day k spans [landfall - 24(k+1) h, landfall - 24k h). Change is the mean
// speed of the span relative to the 7-day regular mean; duration counts hours
// with SPI < 75. Averages run over impacted links (any event-window period
// not free-flowing) within each distance class, pooled across hurricanes.
CalibrationReport calibration_check(const domain::EvacuationData& ds);

nlohmann::json calibration_to_json(const CalibrationReport& r);
std::string format_calibration(const CalibrationReport& r);

} // namespace evacast::synth
