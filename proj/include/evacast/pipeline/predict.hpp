#pragma once

#include "evacast/features/samples.hpp"
#include "evacast/models/mc_dropout.hpp"
#include "evacast/models/serialize.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <map>
#include <string>
#include <vector>

namespace evacast::pipeline {

using Probabilities = std::array<double, features::kNumClasses>;

struct GridRow {
    std::string link_id;
    std::array<features::CongestionLabel, features::kEventPeriods> labels{};
    std::array<Probabilities, features::kEventPeriods> probabilities{};
};

struct CongestionGrid {
    std::string hurricane;
    std::array<Timestamp, features::kEventPeriods> period_starts{};
    std::vector<GridRow> rows;
    std::vector<std::string> skipped_links; // no regular stats
};

// Argmax label of every (link, period); the artifact must use the full long-term schema.
CongestionGrid predict_congestion_grid(const models::MlpArtifact& mlp, const domain::RoadNetwork& network,
                                       const domain::HurricaneEvent& hurricane,
                                       const features::RegularStatsTable& stats,
                                       const features::FeatureConfig& cfg = {});

// Per-link regular stats averaged over every event of a dataset, for scenarios
// with no observed history of their own.
features::RegularStatsTable reference_regular_stats(const domain::EvacuationData& data);

nlohmann::json grid_to_json(const CongestionGrid& g);
// FeatureCollection of link geometries with properties {link_id, labels[28]}.
nlohmann::json grid_to_geojson(const CongestionGrid& g, const domain::RoadNetwork& network);

// Periods [8, 12): the calendar day before the landfall day.
inline constexpr int kDayBeforeFirstPeriod = 8;
inline constexpr int kDayBeforeEndPeriod = 12;

struct Coverage {
    std::size_t true_heavy = 0;
    std::size_t covered = 0; // of those, predicted Heavy
    double fraction() const { return true_heavy ? static_cast<double>(covered) / static_cast<double>(true_heavy) : 0.0; }
};

// Per-(link, period) cell coverage of true Heavy cells in [first, end).
Coverage heavy_coverage(const CongestionGrid& g, const std::map<std::string, features::PeriodLabels>& truth,
                        int first_period = kDayBeforeFirstPeriod, int end_period = kDayBeforeEndPeriod);

struct PredictionWithCI {
    std::string link_id;
    int horizon_h = 1;
    Timestamp target_time{};
    double mean = 0.0; // mph
    double std = 0.0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;
    Timestamp generated_at{};
};

// Uses the last window_len hours of `history`, which must be hourly-resolvable and gap-free there.
PredictionWithCI predict_speed_with_ci(const models::SequenceArtifact& model, const domain::SpeedSeries& history,
                                       const domain::RoadLink& link, const domain::HurricaneEvent& hurricane,
                                       const features::RegularStats& stats,
                                       std::size_t passes = models::kDefaultMcPasses, std::uint64_t seed = 0,
                                       const features::FeatureConfig& cfg = {});

nlohmann::json prediction_to_json(const PredictionWithCI& p);

} // namespace evacast::pipeline
