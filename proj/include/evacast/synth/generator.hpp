#pragma once

#include "evacast/domain/evacuation_data.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <vector>

namespace evacast::synth {

inline constexpr double kBumpStartH = -60.0;
inline constexpr double kBumpEndH = 12.0;
inline constexpr double kMinMultiplier = 0.05;
inline constexpr double kMinSpeedMph = 3.0;
inline constexpr double kMaxSpeedMph = 90.0;
inline constexpr int kSeriesDays = 14; // 7 regular + 7 event

// Generator parameters. Defaults are tuned so calibration_check passes.
struct ScenarioConfig {
    double free_flow_mean = 65.0;
    double free_flow_sd = 5.0;
    double free_flow_min = 55.0;
    double free_flow_max = 75.0;
    double diurnal_dip = 0.04;
    double noise_sd = 3.0;
    double noise_persistence = 0.9; // hour-to-hour AR(1) coefficient of the noise
    std::array<double, 5> dip_amplitude_by_category{0.4, 0.6, 0.8, 1.0, 1.1};
    bool dip_enabled = true;
    double distance_scale_km = 1200.0;
    double inbound_alignment = 0.3;
    // Deficit scale by lane count (2, 3, 4; other counts clamp): narrower roads congest more.
    std::array<double, 3> susceptibility_by_lanes{1.7, 1.0, 0.7};
    // temporal bump: broad evacuation body plus a short surge
    double body_height = 0.16;
    double body_peak_h = -16.0;
    double body_shape = 0.25;
    double surge_height = 1.05;
    double surge_center_h = -42.0;
    double surge_half_width_h = 3.5;
    int utc_offset_hours = -6;
    std::uint64_t rng_seed = 1;
};

void validate(const ScenarioConfig& cfg);
nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig config_from_json(const nlohmann::json& j);

enum class Alignment { Outbound, Inbound };

// Outbound when the link's travel direction points away from the landfall
// (positive dot product with the landfall-to-centroid vector).
Alignment link_alignment(const domain::RoadLink& link, const domain::GeoPoint& landfall);

// w(dt) with dt = t - landfall in hours; zero outside [-60 h, +12 h].
double temporal_bump(double hours_from_landfall, const ScenarioConfig& cfg);

double dip_multiplier(int category, double distance_km, Alignment alignment, double hours_from_landfall,
                      const ScenarioConfig& cfg, double susceptibility = 1.0);

double lane_susceptibility(int lanes, const ScenarioConfig& cfg);

// Multiplicative weekday rush-hour dip at a local clock hour.
double diurnal_factor(double local_hour, const ScenarioConfig& cfg);

domain::RoadNetwork generate_network(int n_links, const domain::BoundingBox& bbox, std::uint64_t seed);

// Hourly speeds over 14 days ending with the event window, one series per link.
domain::SpeedTable generate_speeds(const domain::RoadNetwork& network, const domain::HurricaneEvent& hurricane,
                                   const ScenarioConfig& cfg);

using SyntheticDataset = domain::EvacuationData;

SyntheticDataset generate_dataset(const domain::RoadNetwork& network,
                                  const std::vector<domain::HurricaneEvent>& hurricanes, const ScenarioConfig& cfg);

} // namespace evacast::synth
