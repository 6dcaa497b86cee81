#pragma once

#include "evacast/domain/evacuation_data.hpp"
#include "evacast/features/schema.hpp"
#include "evacast/features/spi.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace evacast::features {

using RegularStatsTable = std::map<std::string, RegularStats>;

struct RegularStatsBuild {
    RegularStatsTable stats;
    std::vector<std::string> failed_links; // no series, or too sparse
};

// Regular stats of every link over the 7 days preceding the event window.
RegularStatsBuild compute_regular_stats_table(const domain::RoadNetwork& net, const domain::HurricaneEvent& h,
                                              const domain::SpeedTable& speeds);

// Hourly view of a series (resampled when recorded at a finer interval).
domain::SpeedSeries hourly(const domain::SpeedSeries& s);

using PeriodLabels = std::array<std::optional<CongestionLabel>, kEventPeriods>;

// Label of every event-window period; empty where an hour is missing or the
// baseline is not positive.
PeriodLabels period_labels(const domain::SpeedSeries& hourly_series, const EventWindow& window, double mean_7d);

struct LongTermSample {
    std::string link_id;
    std::string hurricane;
    int period_index = 0;
    Timestamp period_start{};
    std::vector<double> features;
    CongestionLabel label = CongestionLabel::NoCongestion;
};

struct ExclusionCounts {
    std::size_t no_series = 0;
    std::size_t degenerate_baseline = 0; // no regular stats or v_p <= 0
    std::size_t missing_data = 0;

    std::size_t total() const { return no_series + degenerate_baseline + missing_data; }
};

struct LongTermBuild {
    std::vector<LongTermSample> samples;
    ExclusionCounts excluded;
};

LongTermBuild build_longterm_samples(const domain::RoadNetwork& net, const domain::HurricaneEvent& h,
                                     const domain::SpeedTable& speeds, const RegularStatsTable& stats,
                                     const FeatureConfig& cfg = {});

// All hurricanes of a dataset, each with its own regular stats.
LongTermBuild build_longterm_samples(const domain::EvacuationData& data, const FeatureConfig& cfg = {});

struct ShortTermSequence {
    std::string link_id;
    std::string hurricane;
    int horizon_h = 1;
    Timestamp last_step_time{};
    Timestamp target_time{};
    std::vector<std::vector<double>> steps; // window_len x kShortTermWidth, raw units
    double target_speed = 0.0;
    CongestionLabel target_state = CongestionLabel::NoCongestion; // label of the target's period
};

// Start offsets of every stride-1 window [s, s+L) whose inputs and target
// s+L-1+h are present. On a gap-free series there are n-L-h+1 of them.
std::vector<std::size_t> valid_window_starts(const std::vector<std::optional<double>>& values,
                                             std::size_t window_len, std::size_t horizon_h);

std::vector<ShortTermSequence> build_shortterm_samples(const domain::RoadNetwork& net,
                                                       const domain::HurricaneEvent& h,
                                                       const domain::SpeedTable& speeds,
                                                       const RegularStatsTable& stats, int horizon_h,
                                                       std::size_t window_len = kDefaultWindowLen,
                                                       const FeatureConfig& cfg = {});

// Compact form of the short-term samples of a whole dataset: step features
// are stored once per (link, hurricane) and windows reference them.
struct SequenceTable {
    std::string link_id;
    std::string hurricane;
    std::size_t link_index = 0;
    std::size_t event_index = 0;
    Timestamp start{};
    std::size_t rows = 0;
    std::vector<double> steps; // rows x kShortTermWidth
    std::vector<std::optional<double>> speeds;
    PeriodLabels labels;
    bool has_heavy = false; // any Heavy period in the event window
};

struct WindowRef {
    std::uint32_t table = 0;
    std::uint32_t start = 0;
};

struct ShortTermSet {
    int horizon_h = 1;
    std::size_t window_len = kDefaultWindowLen;
    std::vector<SequenceTable> tables;
    std::vector<WindowRef> windows;
    std::vector<double> targets;
    std::vector<CongestionLabel> states;

    std::size_t size() const { return windows.size(); }
    const double* step_row(std::size_t window, std::size_t step) const;
    double last_speed(std::size_t window) const;
    ShortTermSequence materialize(std::size_t window) const;
};

ShortTermSet build_shortterm_set(const domain::EvacuationData& data, int horizon_h,
                                 std::size_t window_len = kDefaultWindowLen, const FeatureConfig& cfg = {});

} // namespace evacast::features
