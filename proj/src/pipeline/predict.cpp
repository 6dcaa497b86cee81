#include "evacast/pipeline/predict.hpp"

#include "evacast/core/error.hpp"
#include "evacast/features/normalize.hpp"

#include <chrono>

namespace evacast::pipeline {

using features::CongestionLabel;
using nlohmann::json;

CongestionGrid predict_congestion_grid(const models::MlpArtifact& mlp, const domain::RoadNetwork& network,
                                       const domain::HurricaneEvent& hurricane,
                                       const features::RegularStatsTable& stats, const features::FeatureConfig& cfg) {
    if (mlp.feature_names != features::longterm_feature_names())
        throw ValidationError("model feature schema does not match the long-term schema");
    const auto window = features::event_window(hurricane);
    CongestionGrid g;
    g.hurricane = hurricane.name;
    for (int p = 0; p < features::kEventPeriods; ++p) g.period_starts[static_cast<std::size_t>(p)] = window.period_start(p);

    std::vector<const domain::RoadLink*> links;
    for (const auto& l : network.links()) {
        if (stats.count(l.link_id)) links.push_back(&l);
        else g.skipped_links.push_back(l.link_id);
    }
    const auto P = static_cast<std::size_t>(features::kEventPeriods);
    models::Matrix x(static_cast<Eigen::Index>(links.size() * P), static_cast<Eigen::Index>(features::kLongTermWidth));
    for (std::size_t i = 0; i < links.size(); ++i)
        for (std::size_t p = 0; p < P; ++p) {
            auto f = features::longterm_features(*links[i], hurricane, stats.at(links[i]->link_id), g.period_starts[p], cfg);
            mlp.normalization.apply(f);
            for (std::size_t c = 0; c < f.size(); ++c) x(static_cast<Eigen::Index>(i * P + p), static_cast<Eigen::Index>(c)) = f[c];
        }
    const models::Matrix prob = links.empty() ? models::Matrix(0, 3) : mlp.model.forward(x);
    for (std::size_t i = 0; i < links.size(); ++i) {
        GridRow row;
        row.link_id = links[i]->link_id;
        for (std::size_t p = 0; p < P; ++p) {
            const auto r = static_cast<Eigen::Index>(i * P + p);
            Eigen::Index arg = 0;
            prob.row(r).maxCoeff(&arg);
            row.labels[p] = static_cast<CongestionLabel>(arg);
            for (std::size_t c = 0; c < features::kNumClasses; ++c) row.probabilities[p][c] = prob(r, static_cast<Eigen::Index>(c));
        }
        g.rows.push_back(std::move(row));
    }
    return g;
}

features::RegularStatsTable reference_regular_stats(const domain::EvacuationData& data) {
    std::map<std::string, std::pair<features::RegularStats, int>> acc;
    for (const auto& ev : data.events) {
        const auto built = features::compute_regular_stats_table(data.network, ev.event, ev.speeds);
        for (const auto& [id, s] : built.stats) {
            auto& [sum, n] = acc[id];
            sum.link_id = id;
            sum.mean_7d += s.mean_7d;
            sum.std_7d += s.std_7d;
            ++n;
        }
    }
    features::RegularStatsTable out;
    for (auto& [id, v] : acc) {
        v.first.mean_7d /= v.second;
        v.first.std_7d /= v.second;
        out.emplace(id, v.first);
    }
    return out;
}

json grid_to_json(const CongestionGrid& g) {
    json periods = json::array();
    for (const auto t : g.period_starts) periods.push_back(format_timestamp(t));
    json rows = json::array();
    for (const auto& r : g.rows) {
        json labels = json::array();
        json probs = json::array();
        for (std::size_t p = 0; p < r.labels.size(); ++p) {
            labels.push_back(static_cast<int>(r.labels[p]));
            probs.push_back(r.probabilities[p]);
        }
        rows.push_back({{"link_id", r.link_id}, {"labels", labels}, {"probabilities", probs}});
    }
    return {{"hurricane", g.hurricane}, {"period_starts", periods}, {"links", rows}, {"skipped_links", g.skipped_links}};
}

json grid_to_geojson(const CongestionGrid& g, const domain::RoadNetwork& network) {
    json feats = json::array();
    for (const auto& r : g.rows) {
        const auto* link = network.find(r.link_id);
        if (!link) throw ValidationError("grid link not in network: " + r.link_id);
        json coords = json::array();
        for (const auto& p : link->geometry) coords.push_back({p.lon, p.lat});
        json labels = json::array();
        for (const auto l : r.labels) labels.push_back(static_cast<int>(l));
        feats.push_back({{"type", "Feature"},
                         {"geometry", {{"type", "LineString"}, {"coordinates", coords}}},
                         {"properties", {{"link_id", r.link_id}, {"labels", labels}}}});
    }
    return {{"type", "FeatureCollection"}, {"features", feats}};
}

Coverage heavy_coverage(const CongestionGrid& g, const std::map<std::string, features::PeriodLabels>& truth,
                        int first_period, int end_period) {
    if (first_period < 0 || end_period > features::kEventPeriods || end_period <= first_period)
        throw ValidationError("coverage period range out of bounds");
    Coverage c;
    for (const auto& row : g.rows) {
        const auto it = truth.find(row.link_id);
        if (it == truth.end()) continue;
        for (int p = first_period; p < end_period; ++p) {
            const auto& t = it->second[static_cast<std::size_t>(p)];
            if (!t || *t != CongestionLabel::HeavyCongestion) continue;
            ++c.true_heavy;
            if (row.labels[static_cast<std::size_t>(p)] == CongestionLabel::HeavyCongestion) ++c.covered;
        }
    }
    return c;
}

PredictionWithCI predict_speed_with_ci(const models::SequenceArtifact& model, const domain::SpeedSeries& history,
                                       const domain::RoadLink& link, const domain::HurricaneEvent& hurricane,
                                       const features::RegularStats& stats, std::size_t passes, std::uint64_t seed,
                                       const features::FeatureConfig& cfg) {
    if (model.feature_names != features::shortterm_step_names())
        throw ValidationError("model feature schema does not match the short-term schema");
    const auto hourly = features::hourly(history);
    const std::size_t L = model.window_len;
    if (hourly.size() < L)
        throw ValidationError("history length " + std::to_string(hourly.size()) + " h is shorter than the required " +
                              std::to_string(L) + " h");
    const std::size_t first = hourly.size() - L;
    for (std::size_t i = first; i < hourly.size(); ++i)
        if (!hourly.values[i])
            throw ValidationError("history length: the last " + std::to_string(L) + " h must be gap-free (gap at " +
                                  format_timestamp(hourly.time_at(i)) + ")");

    const auto static_block = features::shortterm_static_features(link, hurricane, stats);
    models::SequenceBatch seq(L);
    for (std::size_t t = 0; t < L; ++t) {
        auto step = features::shortterm_step(*hourly.values[first + t], hourly.time_at(first + t), hurricane, static_block, cfg);
        model.normalization.apply(step);
        seq[t] = Eigen::Map<const models::Matrix>(step.data(), 1, static_cast<Eigen::Index>(step.size()));
    }
    const double scale = model.normalization.stddev[features::kSpeedColumn];
    const double shift = model.normalization.mean[features::kSpeedColumn];
    const auto mc = models::mc_dropout_predict(model.model, seq, passes, seed, scale, shift);

    PredictionWithCI p;
    p.link_id = link.link_id;
    p.horizon_h = model.horizon_h;
    p.target_time = hourly.time_at(hourly.size() - 1) + Hours{model.horizon_h};
    p.mean = mc.mean;
    p.std = mc.std;
    p.ci95_low = mc.ci95_low;
    p.ci95_high = mc.ci95_high;
    p.generated_at = std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now());
    return p;
}

json prediction_to_json(const PredictionWithCI& p) {
    return {{"link_id", p.link_id},
            {"horizon_h", p.horizon_h},
            {"target_time", format_timestamp(p.target_time)},
            {"mean", p.mean},
            {"std", p.std},
            {"ci95_low", p.ci95_low},
            {"ci95_high", p.ci95_high},
            {"generated_at", format_timestamp(p.generated_at)}};
}

} // namespace evacast::pipeline
