#include "evacast/features/samples.hpp"

#include "evacast/core/error.hpp"

#include <cmath>
#include <limits>

namespace evacast::features {

using domain::SpeedSeries;

RegularStatsBuild compute_regular_stats_table(const domain::RoadNetwork& net, const domain::HurricaneEvent& h,
                                              const domain::SpeedTable& speeds) {
    RegularStatsBuild out;
    const Timestamp window_end = event_window(h).start;
    for (const auto& link : net.links()) {
        const auto it = speeds.find(link.link_id);
        if (it == speeds.end()) {
            out.failed_links.push_back(link.link_id);
            continue;
        }
        try {
            out.stats.emplace(link.link_id, compute_regular_stats(hourly(it->second), window_end));
        } catch (const ValidationError&) {
            out.failed_links.push_back(link.link_id);
        }
    }
    return out;
}

SpeedSeries hourly(const SpeedSeries& s) {
    if (s.interval == Hours{1}) {
        return s;
    }
    return domain::resample_series(s, Hours{1});
}

PeriodLabels period_labels(const SpeedSeries& series, const EventWindow& window, double mean_7d) {
    PeriodLabels labels{};
    if (!(mean_7d > 0.0)) {
        return labels;
    }
    for (int p = 0; p < kEventPeriods; ++p) {
        const auto first = series.index_of(window.period_start(p));
        if (!first || *first + kPeriodHours > series.size()) {
            continue;
        }
        double sum = 0.0;
        bool complete = true;
        for (std::size_t i = *first; i < *first + kPeriodHours; ++i) {
            if (!series.values[i]) {
                complete = false;
                break;
            }
            sum += *series.values[i];
        }
        if (complete) {
            labels[static_cast<std::size_t>(p)] = label_from_spi(compute_spi(sum / kPeriodHours, mean_7d));
        }
    }
    return labels;
}

LongTermBuild build_longterm_samples(const domain::RoadNetwork& net, const domain::HurricaneEvent& h,
                                     const domain::SpeedTable& speeds, const RegularStatsTable& stats,
                                     const FeatureConfig& cfg) {
    LongTermBuild out;
    const EventWindow window = event_window(h);
    out.samples.reserve(net.size() * kEventPeriods);
    for (const auto& link : net.links()) {
        const auto sit = speeds.find(link.link_id);
        if (sit == speeds.end()) {
            out.excluded.no_series += kEventPeriods;
            continue;
        }
        const auto st = stats.find(link.link_id);
        if (st == stats.end() || !(st->second.mean_7d > 0.0)) {
            out.excluded.degenerate_baseline += kEventPeriods;
            continue;
        }
        const SpeedSeries series = hourly(sit->second);
        const PeriodLabels labels = period_labels(series, window, st->second.mean_7d);
        for (int p = 0; p < kEventPeriods; ++p) {
            const auto& label = labels[static_cast<std::size_t>(p)];
            if (!label) {
                ++out.excluded.missing_data;
                continue;
            }
            const Timestamp ps = window.period_start(p);
            out.samples.push_back(LongTermSample{link.link_id, h.name, p, ps,
                                                 longterm_features(link, h, st->second, ps, cfg), *label});
        }
    }
    return out;
}

LongTermBuild build_longterm_samples(const domain::EvacuationData& data, const FeatureConfig& cfg) {
    LongTermBuild all;
    for (const auto& ev : data.events) {
        const auto stats = compute_regular_stats_table(data.network, ev.event, ev.speeds);
        auto part = build_longterm_samples(data.network, ev.event, ev.speeds, stats.stats, cfg);
        all.excluded.no_series += part.excluded.no_series;
        all.excluded.degenerate_baseline += part.excluded.degenerate_baseline;
        all.excluded.missing_data += part.excluded.missing_data;
        all.samples.insert(all.samples.end(), std::make_move_iterator(part.samples.begin()),
                           std::make_move_iterator(part.samples.end()));
    }
    return all;
}

std::vector<std::size_t> valid_window_starts(const std::vector<std::optional<double>>& values,
                                             std::size_t window_len, std::size_t horizon_h) {
    std::vector<std::size_t> starts;
    const std::size_t n = values.size();
    if (window_len == 0 || horizon_h == 0 || n < window_len + horizon_h) {
        return starts;
    }
    // prefix count of gaps for O(1) window checks
    std::vector<std::size_t> gaps(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        gaps[i + 1] = gaps[i] + (values[i] ? 0 : 1);
    }
    for (std::size_t s = 0; s + window_len + horizon_h <= n; ++s) {
        const std::size_t target = s + window_len - 1 + horizon_h;
        if (gaps[s + window_len] - gaps[s] == 0 && values[target]) {
            starts.push_back(s);
        }
    }
    return starts;
}

namespace {

std::optional<SequenceTable> build_table(const domain::RoadLink& link, std::size_t link_index,
                                         const domain::HurricaneEvent& h, std::size_t event_index,
                                         const domain::SpeedTable& speeds, const RegularStatsTable& stats,
                                         const FeatureConfig& cfg) {
    const auto sit = speeds.find(link.link_id);
    const auto st = stats.find(link.link_id);
    if (sit == speeds.end() || st == stats.end() || !(st->second.mean_7d > 0.0)) {
        return std::nullopt;
    }
    const SpeedSeries series = hourly(sit->second);
    const EventWindow window = event_window(h);
    SequenceTable t;
    t.link_id = link.link_id;
    t.hurricane = h.name;
    t.link_index = link_index;
    t.event_index = event_index;
    t.start = window.start;
    t.rows = kEventHours;
    t.labels = period_labels(series, window, st->second.mean_7d);
    for (const auto& l : t.labels) {
        t.has_heavy = t.has_heavy || (l && *l == CongestionLabel::HeavyCongestion);
    }
    const auto static_block = shortterm_static_features(link, h, st->second);
    t.steps.reserve(t.rows * kShortTermWidth);
    t.speeds.reserve(t.rows);
    for (std::size_t r = 0; r < t.rows; ++r) {
        const Timestamp ts = window.start + Hours{static_cast<long long>(r)};
        const auto idx = series.index_of(ts);
        const std::optional<double> v = idx ? series.values[*idx] : std::nullopt;
        t.speeds.push_back(v);
        const auto step = shortterm_step(v.value_or(std::numeric_limits<double>::quiet_NaN()), ts, h,
                                         static_block, cfg);
        t.steps.insert(t.steps.end(), step.begin(), step.end());
    }
    return t;
}

void append_windows(ShortTermSet& set, std::uint32_t table_index) {
    const SequenceTable& t = set.tables[table_index];
    const auto h = static_cast<std::size_t>(set.horizon_h);
    for (const std::size_t s : valid_window_starts(t.speeds, set.window_len, h)) {
        const std::size_t target = s + set.window_len - 1 + h;
        const auto& state = t.labels[target / kPeriodHours];
        if (!state) {
            continue;
        }
        set.windows.push_back(WindowRef{table_index, static_cast<std::uint32_t>(s)});
        set.targets.push_back(*t.speeds[target]);
        set.states.push_back(*state);
    }
}

void check_horizon(int horizon_h) {
    if (horizon_h < 1 || horizon_h > 6) {
        throw ValidationError("horizon_h must be in [1, 6] (got " + std::to_string(horizon_h) + ")");
    }
}

} // namespace

const double* ShortTermSet::step_row(std::size_t window, std::size_t step) const {
    const WindowRef& w = windows[window];
    return tables[w.table].steps.data() + (w.start + step) * kShortTermWidth;
}

double ShortTermSet::last_speed(std::size_t window) const {
    return step_row(window, window_len - 1)[kSpeedColumn];
}

ShortTermSequence ShortTermSet::materialize(std::size_t window) const {
    const WindowRef& w = windows[window];
    const SequenceTable& t = tables[w.table];
    ShortTermSequence seq;
    seq.link_id = t.link_id;
    seq.hurricane = t.hurricane;
    seq.horizon_h = horizon_h;
    seq.last_step_time = t.start + Hours{static_cast<long long>(w.start + window_len - 1)};
    seq.target_time = seq.last_step_time + Hours{horizon_h};
    for (std::size_t s = 0; s < window_len; ++s) {
        const double* row = step_row(window, s);
        seq.steps.emplace_back(row, row + kShortTermWidth);
    }
    seq.target_speed = targets[window];
    seq.target_state = states[window];
    return seq;
}

std::vector<ShortTermSequence> build_shortterm_samples(const domain::RoadNetwork& net,
                                                       const domain::HurricaneEvent& h,
                                                       const domain::SpeedTable& speeds,
                                                       const RegularStatsTable& stats, int horizon_h,
                                                       std::size_t window_len, const FeatureConfig& cfg) {
    check_horizon(horizon_h);
    ShortTermSet set;
    set.horizon_h = horizon_h;
    set.window_len = window_len;
    for (std::size_t i = 0; i < net.size(); ++i) {
        auto table = build_table(net.links()[i], i, h, 0, speeds, stats, cfg);
        if (!table) {
            continue;
        }
        set.tables.push_back(std::move(*table));
        append_windows(set, static_cast<std::uint32_t>(set.tables.size() - 1));
    }
    std::vector<ShortTermSequence> out;
    out.reserve(set.size());
    for (std::size_t w = 0; w < set.size(); ++w) {
        out.push_back(set.materialize(w));
    }
    return out;
}

ShortTermSet build_shortterm_set(const domain::EvacuationData& data, int horizon_h, std::size_t window_len,
                                 const FeatureConfig& cfg) {
    check_horizon(horizon_h);
    ShortTermSet set;
    set.horizon_h = horizon_h;
    set.window_len = window_len;
    for (std::size_t e = 0; e < data.events.size(); ++e) {
        const auto& ev = data.events[e];
        const auto stats = compute_regular_stats_table(data.network, ev.event, ev.speeds);
        for (std::size_t i = 0; i < data.network.size(); ++i) {
            auto table = build_table(data.network.links()[i], i, ev.event, e, ev.speeds, stats.stats, cfg);
            if (!table) {
                continue;
            }
            set.tables.push_back(std::move(*table));
            append_windows(set, static_cast<std::uint32_t>(set.tables.size() - 1));
        }
    }
    return set;
}

} // namespace evacast::features
