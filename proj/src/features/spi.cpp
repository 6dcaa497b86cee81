#include "evacast/features/spi.hpp"

#include "evacast/core/error.hpp"

#include <cmath>

namespace evacast::features {

SpiValue compute_spi(double v_mean, double v_p) {
    if (!(v_p > 0.0) || !std::isfinite(v_p)) {
        throw ValidationError("degenerate SPI baseline: v_p must be > 0 (got " + std::to_string(v_p) + ")");
    }
    return SpiValue{100.0 * v_mean / v_p};
}

CongestionLabel label_from_spi(SpiValue spi) {
    if (spi.percent < kHeavyThreshold) {
        return CongestionLabel::HeavyCongestion;
    }
    if (spi.percent < kLightThreshold) {
        return CongestionLabel::LightCongestion;
    }
    return CongestionLabel::NoCongestion;
}

std::string to_string(CongestionLabel label) {
    switch (label) {
    case CongestionLabel::NoCongestion: return "No Congestion";
    case CongestionLabel::LightCongestion: return "Light Congestion";
    case CongestionLabel::HeavyCongestion: return "Heavy Congestion";
    }
    return "?";
}

RegularStats compute_regular_stats(const domain::SpeedSeries& series, Timestamp window_end,
                                   double max_missing_fraction) {
    const Timestamp window_start = window_end - std::chrono::days{7};
    const auto first = series.index_of(window_start);
    const auto expected = static_cast<std::size_t>(std::chrono::seconds(std::chrono::days{7}).count() /
                                                   series.interval.count());
    if (!first || *first + expected > series.size()) {
        throw ValidationError("link " + series.link_id + ": series does not cover the 7 days before " +
                              format_timestamp(window_end));
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = *first; i < *first + expected; ++i) {
        if (series.values[i]) {
            sum += *series.values[i];
            ++n;
        }
    }
    const std::size_t missing = expected - n;
    if (n == 0 || static_cast<double>(missing) > max_missing_fraction * static_cast<double>(expected)) {
        throw ValidationError("link " + series.link_id + ": " + std::to_string(missing) + " of " +
                              std::to_string(expected) + " samples missing in the 7-day regular window");
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = *first; i < *first + expected; ++i) {
        if (series.values[i]) {
            const double d = *series.values[i] - mean;
            ss += d * d;
        }
    }
    return RegularStats{series.link_id, mean, std::sqrt(ss / static_cast<double>(n))};
}

int local_hour_of_day(Timestamp t, int utc_offset_hours) {
    const auto local = t + Hours{utc_offset_hours};
    const auto since_midnight = local - std::chrono::floor<std::chrono::days>(local);
    return static_cast<int>(std::chrono::duration_cast<Hours>(since_midnight).count());
}

int time_of_day_slot(Timestamp t, int utc_offset_hours) {
    return local_hour_of_day(t, utc_offset_hours) / 6 + 1;
}

int slots_to_landfall(Timestamp period_start, Timestamp landfall) {
    const auto diff = (landfall - period_start).count();
    constexpr long long six_hours = 6 * 3600;
    long long q = diff / six_hours;
    if (diff % six_hours != 0 && diff < 0) {
        --q;
    }
    return static_cast<int>(q);
}

} // namespace evacast::features
