#include "evacast/synth/generator.hpp"

#include "evacast/core/error.hpp"
#include "evacast/core/rng.hpp"
#include "evacast/features/schema.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace evacast::synth {

using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamGeometry = 0x6e6574;
constexpr std::uint64_t kStreamFreeFlow = 0x666666;

// Raised-cosine shape: 0 at lo, 1 at peak, 0 at hi.
double raised_bump(double t, double lo, double peak, double hi) {
    if (t <= lo || t >= hi) return 0.0;
    const double half_pi = std::numbers::pi / 2.0;
    if (t <= peak) {
        const double s = std::sin(half_pi * (t - lo) / (peak - lo));
        return s * s;
    }
    const double c = std::cos(half_pi * (t - peak) / (hi - peak));
    return c * c;
}

double gauss(double x, double mu, double sd) {
    const double z = (x - mu) / sd;
    return std::exp(-0.5 * z * z);
}

} // namespace

void validate(const ScenarioConfig& cfg) {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw ValidationError(std::string("scenario config: ") + msg);
    };
    require(cfg.free_flow_sd >= 0.0, "free_flow_sd must be >= 0");
    require(cfg.free_flow_min > 0.0 && cfg.free_flow_min <= cfg.free_flow_max,
            "free_flow bounds must satisfy 0 < min <= max");
    require(cfg.diurnal_dip >= 0.0 && cfg.diurnal_dip < 0.5, "diurnal_dip must be in [0, 0.5)");
    require(cfg.noise_sd >= 0.0, "noise_sd must be >= 0");
    require(cfg.noise_persistence >= 0.0 && cfg.noise_persistence < 1.0, "noise_persistence must be in [0, 1)");
    for (double a : cfg.dip_amplitude_by_category)
        require(a > 0.0 && a <= 2.0, "dip amplitudes must be in (0, 2]");
    require(cfg.distance_scale_km > 0.0, "distance_scale_km must be > 0");
    for (double r : cfg.susceptibility_by_lanes) require(r > 0.0 && r <= 3.0, "susceptibility must be in (0, 3]");
    require(cfg.inbound_alignment >= 0.0 && cfg.inbound_alignment <= 1.0, "inbound_alignment must be in [0, 1]");
    require(cfg.body_height >= 0.0 && cfg.surge_height >= 0.0, "bump heights must be >= 0");
    require(cfg.body_peak_h > kBumpStartH && cfg.body_peak_h < kBumpEndH, "body_peak_h must lie inside the bump support");
    require(cfg.body_shape > 0.0, "body_shape must be > 0");
    require(cfg.surge_half_width_h > 0.0, "surge_half_width_h must be > 0");
    require(cfg.surge_center_h - cfg.surge_half_width_h >= kBumpStartH &&
                cfg.surge_center_h + cfg.surge_half_width_h <= kBumpEndH,
            "surge must lie inside the bump support");
    require(cfg.utc_offset_hours >= -12 && cfg.utc_offset_hours <= 14, "utc_offset_hours out of range");
}

json config_to_json(const ScenarioConfig& cfg) {
    return json{{"free_flow_mean", cfg.free_flow_mean},
                {"free_flow_sd", cfg.free_flow_sd},
                {"free_flow_min", cfg.free_flow_min},
                {"free_flow_max", cfg.free_flow_max},
                {"diurnal_dip", cfg.diurnal_dip},
                {"noise_sd", cfg.noise_sd},
                {"noise_persistence", cfg.noise_persistence},
                {"dip_amplitude_by_category", cfg.dip_amplitude_by_category},
                {"dip_enabled", cfg.dip_enabled},
                {"distance_scale_km", cfg.distance_scale_km},
                {"inbound_alignment", cfg.inbound_alignment},
                {"susceptibility_by_lanes", cfg.susceptibility_by_lanes},
                {"body_height", cfg.body_height},
                {"body_peak_h", cfg.body_peak_h},
                {"body_shape", cfg.body_shape},
                {"surge_height", cfg.surge_height},
                {"surge_center_h", cfg.surge_center_h},
                {"surge_half_width_h", cfg.surge_half_width_h},
                {"utc_offset_hours", cfg.utc_offset_hours},
                {"rng_seed", cfg.rng_seed}};
}

ScenarioConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("scenario config must be a JSON object");
    ScenarioConfig c;
    auto get = [&j](const char* key, auto& dst) {
        if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
    };
    try {
        get("free_flow_mean", c.free_flow_mean);
        get("free_flow_sd", c.free_flow_sd);
        get("free_flow_min", c.free_flow_min);
        get("free_flow_max", c.free_flow_max);
        get("diurnal_dip", c.diurnal_dip);
        get("noise_sd", c.noise_sd);
        get("noise_persistence", c.noise_persistence);
        get("dip_amplitude_by_category", c.dip_amplitude_by_category);
        get("dip_enabled", c.dip_enabled);
        get("distance_scale_km", c.distance_scale_km);
        get("inbound_alignment", c.inbound_alignment);
        get("susceptibility_by_lanes", c.susceptibility_by_lanes);
        get("body_height", c.body_height);
        get("body_peak_h", c.body_peak_h);
        get("body_shape", c.body_shape);
        get("surge_height", c.surge_height);
        get("surge_center_h", c.surge_center_h);
        get("surge_half_width_h", c.surge_half_width_h);
        get("utc_offset_hours", c.utc_offset_hours);
        get("rng_seed", c.rng_seed);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario config: ") + e.what());
    }
    validate(c);
    return c;
}

Alignment link_alignment(const domain::RoadLink& link, const domain::GeoPoint& landfall) {
    const auto u = domain::unit_vector(link.direction);
    const double coslat = std::cos(landfall.lat * std::numbers::pi / 180.0);
    const double dx = (link.centroid.lon - landfall.lon) * coslat;
    const double dy = link.centroid.lat - landfall.lat;
    return u[0] * dx + u[1] * dy > 0.0 ? Alignment::Outbound : Alignment::Inbound;
}

double temporal_bump(double dt, const ScenarioConfig& cfg) {
    if (dt <= kBumpStartH || dt >= kBumpEndH) return 0.0;
    const double body = std::pow(raised_bump(dt, kBumpStartH, cfg.body_peak_h, kBumpEndH), cfg.body_shape);
    const double surge = raised_bump(dt, cfg.surge_center_h - cfg.surge_half_width_h, cfg.surge_center_h,
                                     cfg.surge_center_h + cfg.surge_half_width_h);
    return cfg.body_height * body + cfg.surge_height * surge;
}

double lane_susceptibility(int lanes, const ScenarioConfig& cfg) {
    return cfg.susceptibility_by_lanes[static_cast<std::size_t>(std::clamp(lanes, 2, 4) - 2)];
}

double dip_multiplier(int category, double distance_km, Alignment alignment, double dt, const ScenarioConfig& cfg,
                      double susceptibility) {
    if (category < 1 || category > 5) throw ValidationError("category must be in [1, 5]");
    if (distance_km < 0.0) throw ValidationError("distance must be >= 0");
    if (!cfg.dip_enabled) return 1.0;
    const double amp = cfg.dip_amplitude_by_category[static_cast<std::size_t>(category - 1)];
    const double align = alignment == Alignment::Outbound ? 1.0 : cfg.inbound_alignment;
    const double m = 1.0 - amp * std::exp(-distance_km / cfg.distance_scale_km) * temporal_bump(dt, cfg) * align * susceptibility;
    return std::clamp(m, kMinMultiplier, 1.0);
}

double diurnal_factor(double h, const ScenarioConfig& cfg) {
    return 1.0 - cfg.diurnal_dip * (gauss(h, 8.0, 1.5) + gauss(h, 17.0, 2.0));
}

domain::RoadNetwork generate_network(int n_links, const domain::BoundingBox& bbox, std::uint64_t seed) {
    if (n_links <= 0) throw ValidationError("n_links must be > 0");
    if (!(bbox.min_lat < bbox.max_lat && bbox.min_lon < bbox.max_lon))
        throw ValidationError("bounding box must have positive extent");

    constexpr double kMaxHalfLenDeg = 0.02;
    const double margin = std::min({kMaxHalfLenDeg, (bbox.max_lat - bbox.min_lat) / 4.0,
                                    (bbox.max_lon - bbox.min_lon) / 4.0});
    const double lat0 = bbox.min_lat + margin, lat_span = bbox.max_lat - bbox.min_lat - 2 * margin;
    const double lon0 = bbox.min_lon + margin, lon_span = bbox.max_lon - bbox.min_lon - 2 * margin;
    const int width = std::max(4, static_cast<int>(std::to_string(n_links).size()));

    std::vector<domain::RoadLink> links;
    links.reserve(static_cast<std::size_t>(n_links));
    for (int i = 0; i < n_links; ++i) {
        Rng rng(derive_seed(seed, kStreamGeometry, static_cast<std::uint64_t>(i)));
        domain::RoadLink l;
        const std::string num = std::to_string(i + 1);
        l.link_id = "L" + std::string(static_cast<std::size_t>(width) - std::min<std::size_t>(num.size(), width), '0') + num;
        // Road density falls off with distance from the coast.
        const double u = uniform01(rng);
        const double lat = lat0 + lat_span * u * u;
        const double lon = lon0 + lon_span * uniform01(rng);
        l.direction = domain::kDirections[static_cast<std::size_t>(rng() % 4)];
        l.lanes = 2 + static_cast<int>(rng() % 3);
        const double half = margin * (0.25 + 0.75 * uniform01(rng));
        const auto v = domain::unit_vector(l.direction);
        l.geometry = {{lat - half * v[1], lon - half * v[0]}, {lat + half * v[1], lon + half * v[0]}};
        l.centroid = domain::vertex_centroid(l.geometry);
        links.push_back(std::move(l));
    }
    return domain::RoadNetwork(std::move(links));
}

domain::SpeedTable generate_speeds(const domain::RoadNetwork& network, const domain::HurricaneEvent& h,
                                   const ScenarioConfig& cfg) {
    validate(cfg);
    domain::validate(h);
    const Timestamp start = features::history_start(h);
    const std::size_t n = static_cast<std::size_t>(kSeriesDays) * 24;
    const std::uint64_t event_stream = fnv1a(h.name);

    // The clock pattern repeats daily; precompute it once.
    std::array<double, 24> diurnal{};
    for (int hr = 0; hr < 24; ++hr) diurnal[static_cast<std::size_t>(hr)] = diurnal_factor(hr, cfg);
    const long long start_hour = start.time_since_epoch().count() / 3600;

    domain::SpeedTable out;
    for (std::size_t li = 0; li < network.size(); ++li) {
        const auto& link = network.links()[li];
        Rng ff_rng(derive_seed(cfg.rng_seed, kStreamFreeFlow, li));
        std::normal_distribution<double> ff_dist(cfg.free_flow_mean, cfg.free_flow_sd);
        const double free_flow =
            cfg.free_flow_sd > 0.0 ? std::clamp(ff_dist(ff_rng), cfg.free_flow_min, cfg.free_flow_max)
                                   : std::clamp(cfg.free_flow_mean, cfg.free_flow_min, cfg.free_flow_max);

        Rng noise_rng(derive_seed(cfg.rng_seed, event_stream, li));
        std::normal_distribution<double> noise(0.0, cfg.noise_sd > 0.0 ? cfg.noise_sd : 1.0);
        const double dist = domain::haversine_km(link.centroid, h.landfall_point);
        const Alignment align = link_alignment(link, h.landfall_point);
        const double rho = lane_susceptibility(link.lanes, cfg);

        domain::SpeedSeries s;
        s.link_id = link.link_id;
        s.start = start;
        s.interval = Hours{1};
        s.values.resize(n);
        // AR(1) deviation with stationary sd noise_sd
        const double phi = cfg.noise_persistence;
        const double innovation = std::sqrt(1.0 - phi * phi);
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Timestamp t = s.time_at(i);
            const long long local = start_hour + static_cast<long long>(i) + cfg.utc_offset_hours;
            const auto hr = static_cast<std::size_t>(((local % 24) + 24) % 24);
            const double dt = hours_between(t, h.landfall_time);
            double v = free_flow * diurnal[hr] * dip_multiplier(h.category, dist, align, dt, cfg, rho);
            if (cfg.noise_sd > 0.0) {
                e = i == 0 ? noise(noise_rng) : phi * e + innovation * noise(noise_rng);
                v += e;
            }
            s.values[i] = std::clamp(v, kMinSpeedMph, kMaxSpeedMph);
        }
        out.emplace(link.link_id, std::move(s));
    }
    return out;
}

SyntheticDataset generate_dataset(const domain::RoadNetwork& network,
                                  const std::vector<domain::HurricaneEvent>& hurricanes, const ScenarioConfig& cfg) {
    if (hurricanes.empty()) throw ValidationError("at least one hurricane is required");
    SyntheticDataset ds{network, {}};
    for (const auto& h : hurricanes) {
        for (const auto& e : ds.events)
            if (e.event.name == h.name) throw ValidationError("duplicate hurricane name: " + h.name);
        ds.events.push_back({h, generate_speeds(network, h, cfg)});
    }
    return ds;
}

} // namespace evacast::synth
