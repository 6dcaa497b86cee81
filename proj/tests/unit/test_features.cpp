#include "evacast/core/error.hpp"
#include "evacast/features/normalize.hpp"
#include "evacast/features/samples.hpp"
#include "evacast/features/schema.hpp"
#include "evacast/features/spi.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace evacast;
using namespace evacast::features;

namespace {

// One link with hourly speeds from history_start through the event window end.
domain::SpeedSeries full_series(const domain::HurricaneEvent& h, double regular, double event) {
    domain::SpeedSeries s;
    s.link_id = "L1";
    s.start = history_start(h);
    s.interval = Hours{1};
    for (int i = 0; i < kHistoryDays * 24; ++i) s.values.push_back(regular);
    for (int i = 0; i < kEventHours; ++i) s.values.push_back(event);
    return s;
}

} // namespace

TEST_CASE("speed performance index") {
    CHECK(compute_spi(60, 60).percent == 100.0);
    CHECK(compute_spi(30, 60).percent == 50.0);
    CHECK(std::abs(compute_spi(20, 60).percent - 33.33) < 0.01);
    CHECK_THROWS_AS(compute_spi(60, 0), ValidationError);
}

TEST_CASE("congestion labels from SPI") {
    CHECK(label_from_spi({49.99}) == CongestionLabel::HeavyCongestion);
    CHECK(label_from_spi({50.0}) == CongestionLabel::LightCongestion);
    CHECK(label_from_spi({74.99}) == CongestionLabel::LightCongestion);
    CHECK(label_from_spi({75.0}) == CongestionLabel::NoCongestion);
    CHECK(label_from_spi({80.0}) == CongestionLabel::NoCongestion);
    CHECK(label_from_spi({0.0}) == CongestionLabel::HeavyCongestion);
}

TEST_CASE("regular-speed statistics over the preceding week") {
    domain::SpeedSeries s;
    s.link_id = "L7";
    s.start = parse_timestamp("2021-08-01T00:00Z");
    s.values.assign(168, 60.0);
    const Timestamp end = s.start + Hours{168};
    auto r = compute_regular_stats(s, end);
    CHECK(r.mean_7d == 60.0);
    CHECK(r.std_7d == 0.0);

    for (std::size_t i = 0; i < s.size(); ++i) s.values[i] = i % 2 ? 70.0 : 50.0;
    r = compute_regular_stats(s, end);
    CHECK(r.mean_7d == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(r.std_7d == doctest::Approx(10.0).epsilon(1e-12));

    // 16 of 168 missing is within 10%, 17 is not
    for (std::size_t i = 0; i < 16; ++i) s.values[i] = std::nullopt;
    CHECK_NOTHROW(compute_regular_stats(s, end));
    s.values[16] = std::nullopt;
    s.values[17] = std::nullopt;
    try {
        compute_regular_stats(s, end);
        FAIL("sparse window accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("L7") != std::string::npos);
    }
    CHECK_THROWS_AS(compute_regular_stats(s, end + Hours{1}), ValidationError);
}

TEST_CASE("time-of-day slots") {
    CHECK(time_of_day_slot(parse_timestamp("2021-08-29T08:30Z")) == 2);
    CHECK(time_of_day_slot(parse_timestamp("2021-08-29T00:00Z")) == 1);
    CHECK(time_of_day_slot(parse_timestamp("2021-08-29T05:59Z")) == 1);
    CHECK(time_of_day_slot(parse_timestamp("2021-08-29T12:00Z")) == 3);
    CHECK(time_of_day_slot(parse_timestamp("2021-08-29T23:59Z")) == 4);
    // 14:30 UTC is 08:30 at UTC-6
    CHECK(time_of_day_slot(parse_timestamp("2021-08-29T14:30Z"), -6) == 2);
    CHECK(local_hour_of_day(parse_timestamp("2021-08-29T03:10Z"), -6) == 21);
}

TEST_CASE("slots to landfall") {
    const auto lf = parse_timestamp("2021-08-29T16:55Z");
    CHECK(slots_to_landfall(lf, lf) == 0);
    CHECK(slots_to_landfall(lf - Hours{24}, lf) == 4);
    CHECK(slots_to_landfall(lf + Hours{9}, lf) == -2);
    CHECK(slots_to_landfall(lf - Hours{5}, lf) == 0);
    CHECK(slots_to_landfall(lf + Hours{1}, lf) == -1);
}

TEST_CASE("event window is anchored three days before the landfall day") {
    const auto h = testing::ida();
    const auto w = event_window(h);
    CHECK(format_timestamp(w.start) == "2021-08-26T00:00:00Z");
    CHECK(format_timestamp(w.end()) == "2021-09-02T00:00:00Z");
    CHECK(format_timestamp(w.period_start(27)) == "2021-09-01T18:00:00Z");
    CHECK(w.period_of(w.start) == 0);
    CHECK(w.period_of(w.end() - Seconds{1}) == 27);
    CHECK_FALSE(w.period_of(w.end()));
    CHECK(format_timestamp(history_start(h)) == "2021-08-19T00:00:00Z");
}

TEST_CASE("long-term feature vector layout") {
    const auto h = testing::ida();
    const auto link = testing::straight_link("L1", 30.0, -91.0, domain::Direction::E, 4);
    const RegularStats st{"L1", 62.0, 3.0};
    const auto t = h.landfall_time - Hours{24};
    const auto v = longterm_features(link, h, st, t, FeatureConfig{});
    REQUIRE(v.size() == kLongTermWidth);
    REQUIRE(longterm_feature_names().size() == kLongTermWidth);
    const auto at = [&](const std::string& n) {
        const auto& names = longterm_feature_names();
        return v[static_cast<std::size_t>(std::find(names.begin(), names.end(), n) - names.begin())];
    };
    CHECK(at("dir_N") == 0.0);
    CHECK(at("dir_E") == 1.0);
    CHECK(at("lanes") == 4.0);
    CHECK(at("mean_7d") == 62.0);
    CHECK(at("std_7d") == 3.0);
    CHECK(at("distance_to_landfall") == domain::haversine_km(link.centroid, h.landfall_point));
    CHECK(at("time_to_landfall") == 4.0);
    CHECK(at("time_of_day") == static_cast<double>(time_of_day_slot(t, -6)));
    CHECK(at("category") == 4.0);
    CHECK(at("landfall_zone") == 1.0);
    CHECK(passthrough_mask(longterm_feature_names()) ==
          std::vector<bool>{true, true, true, true, false, false, false, false, false, false, false, false, false,
                            false});
}

TEST_CASE("feature name aliases") {
    CHECK(canonical_feature_name("slots_to_landfall") == "time_to_landfall");
    CHECK(canonical_feature_name("hours_to_landfall") == "time_to_landfall");
    CHECK(canonical_feature_name("distance_to_landfall") == "distance_to_landfall");
    CHECK_FALSE(canonical_feature_name("wind_speed"));
}

TEST_CASE("long-term samples for one link") {
    const auto h = testing::ida();
    const domain::RoadNetwork net({testing::straight_link("L1", 30.0, -91.0, domain::Direction::N)});
    domain::SpeedTable speeds{{"L1", full_series(h, 60.0, 60.0)}};
    auto stats = compute_regular_stats_table(net, h, speeds);
    REQUIRE(stats.failed_links.empty());
    auto b = build_longterm_samples(net, h, speeds, stats.stats);
    REQUIRE(b.samples.size() == static_cast<std::size_t>(kEventPeriods));
    for (int p = 0; p < kEventPeriods; ++p) {
        CHECK(b.samples[static_cast<std::size_t>(p)].period_index == p);
        CHECK(b.samples[static_cast<std::size_t>(p)].label == CongestionLabel::NoCongestion);
    }

    // event speeds at a third of the regular speed -> all Heavy
    speeds["L1"] = full_series(h, 60.0, 20.0);
    b = build_longterm_samples(net, h, speeds, stats.stats);
    for (const auto& s : b.samples) CHECK(s.label == CongestionLabel::HeavyCongestion);

    // one missing hour removes exactly its period
    speeds["L1"].values[kHistoryDays * 24 + 7] = std::nullopt;
    b = build_longterm_samples(net, h, speeds, stats.stats);
    CHECK(b.samples.size() == static_cast<std::size_t>(kEventPeriods - 1));
    CHECK(b.excluded.missing_data == 1);

    // no series at all: exclusions count (link, period) cells
    b = build_longterm_samples(net, h, domain::SpeedTable{}, stats.stats);
    CHECK(b.samples.empty());
    CHECK(b.excluded.no_series == static_cast<std::size_t>(kEventPeriods));
}

TEST_CASE("period labels use the period mean") {
    const auto h = testing::ida();
    auto s = full_series(h, 60.0, 60.0);
    // period 3: hours averaging 40 (SPI 66.7) -> Light
    const std::size_t base = kHistoryDays * 24 + 3 * kPeriodHours;
    const double hours[6] = {20, 60, 40, 40, 30, 50};
    for (std::size_t i = 0; i < 6; ++i) s.values[base + i] = hours[i];
    const auto labels = period_labels(s, event_window(h), 60.0);
    CHECK(labels[3] == CongestionLabel::LightCongestion);
    CHECK(labels[2] == CongestionLabel::NoCongestion);
    CHECK(labels[4] == CongestionLabel::NoCongestion);
}

TEST_CASE("window counts") {
    const auto count = [](std::size_t n, std::size_t L, std::size_t h) {
        return valid_window_starts(std::vector<std::optional<double>>(n, 50.0), L, h).size();
    };
    CHECK(count(168, 24, 6) == 139);
    CHECK(count(30, 24, 6) == 1);
    CHECK(count(29, 24, 6) == 0);
    CHECK(count(25, 24, 1) == 1);
    // a gap kills every window that reads it as input or target
    std::vector<std::optional<double>> v(40, 50.0);
    v[30] = std::nullopt;
    const auto starts = valid_window_starts(v, 24, 1);
    for (const auto s : starts) {
        CHECK((s + 24 <= 30 || s > 30));
        CHECK(s + 24 != 30);
    }
}

TEST_CASE("short-term samples and the compact set agree") {
    const auto& data = testing::small_dataset();
    const auto& ev = data.events[0];
    const auto stats = compute_regular_stats_table(data.network, ev.event, ev.speeds);
    const auto seqs = build_shortterm_samples(data.network, ev.event, ev.speeds, stats.stats, 3);
    const auto set = build_shortterm_set(data, 3);
    std::size_t from_first = 0;
    for (std::size_t w = 0; w < set.size(); ++w) {
        const auto& t = set.tables[set.windows[w].table];
        if (t.event_index != 0) continue;
        const auto m = set.materialize(w);
        const auto& s = seqs[from_first++];
        CHECK(m.link_id == s.link_id);
        CHECK(m.last_step_time == s.last_step_time);
        CHECK(m.target_time == s.last_step_time + Hours{3});
        CHECK(m.steps == s.steps);
        CHECK(m.target_speed == s.target_speed);
        CHECK(m.target_state == s.target_state);
        CHECK(set.last_speed(w) == s.steps.back()[kSpeedColumn]);
        CHECK(s.steps.size() == 24u);
        if (from_first > 500) break;
    }
    CHECK(from_first > 0);
}

TEST_CASE("z-score normalization") {
    std::vector<std::vector<double>> rows{{0.0, 5.0, 1.0}, {10.0, 5.0, 0.0}};
    const auto st = fit_normalizer(2, [&](std::size_t i) { return rows[i].data(); }, {false, false, true});
    CHECK(st.mean[0] == 5.0);
    CHECK(st.stddev[0] == 5.0);
    CHECK(st.stddev[1] == 1.0); // constant column
    CHECK(st.mean[2] == 0.0);   // passthrough
    CHECK(st.stddev[2] == 1.0);
    auto r0 = rows[0];
    auto r1 = rows[1];
    st.apply(r0);
    st.apply(r1);
    CHECK(r0 == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(r1 == std::vector<double>{1.0, 0.0, 0.0});
    st.invert(r0);
    CHECK(r0 == rows[0]);

    const auto back = normalization_from_json(normalization_to_json(st));
    CHECK(back.mean == st.mean);
    CHECK(back.stddev == st.stddev);
    CHECK(back.passthrough == st.passthrough);
}
