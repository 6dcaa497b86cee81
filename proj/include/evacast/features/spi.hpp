#pragma once

#include "evacast/core/time.hpp"
#include "evacast/domain/speed.hpp"

#include <array>
#include <string>

namespace evacast::features {

// Speed performance index in percent: 100 * v_mean / v_p.
struct SpiValue {
    double percent = 0.0;
};

SpiValue compute_spi(double v_mean, double v_p);

enum class CongestionLabel : int { NoCongestion = 0, LightCongestion = 1, HeavyCongestion = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr double kHeavyThreshold = 50.0;
inline constexpr double kLightThreshold = 75.0;

// Heavy below 50, Light on [50, 75), none from 75 up.
CongestionLabel label_from_spi(SpiValue spi);

std::string to_string(CongestionLabel label);
inline constexpr std::array<CongestionLabel, 3> kLabels{
    CongestionLabel::NoCongestion, CongestionLabel::LightCongestion, CongestionLabel::HeavyCongestion};

struct RegularStats {
    std::string link_id;
    double mean_7d = 0.0;
    double std_7d = 0.0; // population
};

inline constexpr double kMaxMissingFraction = 0.10;

// Mean and population std over [window_end - 7 days, window_end). Gaps are
// skipped; a window that is not covered by the series, or with more than
// max_missing_fraction gaps, is an error naming the link.
RegularStats compute_regular_stats(const domain::SpeedSeries& series, Timestamp window_end,
                                   double max_missing_fraction = kMaxMissingFraction);

// 1..4 for the local-clock buckets 0-6, 6-12, 12-18, 18-24 h.
int time_of_day_slot(Timestamp t, int utc_offset_hours = 0);
int local_hour_of_day(Timestamp t, int utc_offset_hours = 0);

// floor((landfall - period_start) / 6h): positive before landfall.
int slots_to_landfall(Timestamp period_start, Timestamp landfall);

} // namespace evacast::features
