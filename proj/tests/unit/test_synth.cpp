#include "evacast/core/error.hpp"
#include "evacast/features/schema.hpp"
#include "evacast/features/spi.hpp"
#include "evacast/pipeline/config.hpp"
#include "evacast/synth/calibration.hpp"
#include "evacast/synth/dataset_io.hpp"
#include "evacast/synth/generator.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace evacast;
using namespace evacast::synth;

TEST_CASE("network generation is seeded and stays inside the box") {
    const auto a = generate_network(1, domain::kLouisianaBox, 7);
    const auto b = generate_network(1, domain::kLouisianaBox, 7);
    CHECK(a.links()[0].geometry == b.links()[0].geometry);
    CHECK(a.links()[0].lanes == b.links()[0].lanes);

    const auto net = generate_network(50, domain::kLouisianaBox, 1);
    CHECK(net.size() == 50);
    for (const auto& l : net.links())
        for (const auto& p : l.geometry) CHECK(domain::kLouisianaBox.contains(p));
    CHECK_THROWS_AS(generate_network(0, domain::kLouisianaBox, 1), ValidationError);
}

TEST_CASE("link directions are close to uniform") {
    const auto net = generate_network(10000, domain::kLouisianaBox, 1);
    std::array<int, 4> hist{};
    for (const auto& l : net.links()) ++hist[static_cast<std::size_t>(l.direction)];
    for (const int c : hist) CHECK(std::abs(c - 2500) <= 150);
}

TEST_CASE("the evacuation dip vanishes far from landfall") {
    const ScenarioConfig cfg;
    CHECK(temporal_bump(-200.0, cfg) == 0.0);
    CHECK(temporal_bump(kBumpStartH - 1.0, cfg) == 0.0);
    CHECK(temporal_bump(kBumpEndH + 1.0, cfg) == 0.0);
    CHECK(temporal_bump(cfg.surge_center_h, cfg) > 0.0);
    for (const auto al : {Alignment::Outbound, Alignment::Inbound})
        for (int cat = 1; cat <= 5; ++cat) CHECK(dip_multiplier(cat, 10.0, al, -200.0, cfg) == 1.0);
}

TEST_CASE("dip deepens with category and closeness") {
    const ScenarioConfig cfg;
    const double t = -24.0; // away from the surge, so nothing saturates
    for (int cat = 1; cat < 5; ++cat)
        CHECK(dip_multiplier(cat + 1, 50.0, Alignment::Outbound, t, cfg) <
              dip_multiplier(cat, 50.0, Alignment::Outbound, t, cfg));
    CHECK(dip_multiplier(4, 20.0, Alignment::Outbound, t, cfg) < dip_multiplier(4, 400.0, Alignment::Outbound, t, cfg));
    CHECK(dip_multiplier(4, 50.0, Alignment::Outbound, t, cfg) < dip_multiplier(4, 50.0, Alignment::Inbound, t, cfg));
    for (double dt = -70; dt <= 20; dt += 0.5)
        for (int cat = 1; cat <= 5; ++cat) {
            const double m = dip_multiplier(cat, 0.0, Alignment::Outbound, dt, cfg, 2.0);
            CHECK(m >= kMinMultiplier);
            CHECK(m <= 1.0);
        }
    ScenarioConfig off = cfg;
    off.dip_enabled = false;
    CHECK(dip_multiplier(5, 0.0, Alignment::Outbound, t, off) == 1.0);
}

TEST_CASE("link alignment relative to landfall") {
    const domain::GeoPoint landfall{29.0, -90.0};
    const auto north = testing::straight_link("A", 30.0, -90.0, domain::Direction::N);
    const auto south = testing::straight_link("B", 30.0, -90.0, domain::Direction::S);
    CHECK(link_alignment(north, landfall) == Alignment::Outbound);
    CHECK(link_alignment(south, landfall) == Alignment::Inbound);
}

TEST_CASE("without noise or dip the speeds are the diurnal baseline for every hurricane") {
    ScenarioConfig cfg;
    cfg.noise_sd = 0.0;
    cfg.dip_enabled = false;
    const auto net = generate_network(5, domain::kLouisianaBox, 3);
    const auto a = generate_speeds(net, *domain::find_preset("ida"), cfg);
    const auto b = generate_speeds(net, *domain::find_preset("barry"), cfg);
    for (const auto& link : net.links()) {
        const auto& sa = a.at(link.link_id);
        const auto& sb = b.at(link.link_id);
        // value by local clock hour, which must agree across days and events
        std::array<std::optional<double>, 24> by_hour{};
        for (const auto* s : {&sa, &sb})
            for (std::size_t i = 0; i < s->size(); ++i) {
                const int hr = features::local_hour_of_day(s->time_at(i), cfg.utc_offset_hours);
                auto& slot = by_hour[static_cast<std::size_t>(hr)];
                if (!slot) slot = *s->values[i];
                CHECK(*s->values[i] == doctest::Approx(*slot).epsilon(1e-12));
            }
        const double ff = *by_hour[3] / diurnal_factor(3, cfg);
        for (int hr = 0; hr < 24; ++hr)
            CHECK(*by_hour[static_cast<std::size_t>(hr)] == doctest::Approx(ff * diurnal_factor(hr, cfg)));
    }
}

TEST_CASE("speed generation is deterministic and spans the history plus event windows") {
    const ScenarioConfig cfg;
    const auto net = generate_network(10, domain::kLouisianaBox, 1);
    const auto h = testing::ida();
    const auto a = generate_speeds(net, h, cfg);
    const auto b = generate_speeds(net, h, cfg);
    for (const auto& [id, s] : a) {
        CHECK(s.values == b.at(id).values);
        CHECK(s.size() == static_cast<std::size_t>(kSeriesDays) * 24);
        CHECK(s.start == features::history_start(h));
        CHECK(s.end() == features::event_window(h).end());
        for (const auto& v : s.values) {
            CHECK(*v >= kMinSpeedMph);
            CHECK(*v <= kMaxSpeedMph);
        }
    }
    ScenarioConfig other = cfg;
    other.rng_seed = 2;
    CHECK(generate_speeds(net, h, other).begin()->second.values != a.begin()->second.values);
}

TEST_CASE("scenario config validation and JSON") {
    ScenarioConfig cfg;
    cfg.noise_persistence = 0.5;
    cfg.rng_seed = 42;
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    cfg.noise_persistence = 1.0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = {};
    cfg.noise_sd = -1;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    // partial JSON keeps defaults
    CHECK(config_to_json(config_from_json(nlohmann::json::object())) == config_to_json(ScenarioConfig{}));
}

TEST_CASE("nearby radius is fifty miles") {
    CHECK(std::abs(kNearbyKm - 80.47) < 0.005);
}

TEST_CASE("the default fixture passes calibration") {
    const auto data = pipeline::load_or_generate(pipeline::DataSource{});
    const auto r = calibration_check(data);
    INFO(format_calibration(r));
    CHECK(r.pass);
    CHECK(r.failures.empty());
    CHECK(r.nearby.n_links + r.distant.n_links == data.network.size() * data.events.size());
}

TEST_CASE("calibration fails when the dip is disabled") {
    pipeline::DataSource src;
    src.scenario.dip_enabled = false;
    const auto r = calibration_check(pipeline::load_or_generate(src));
    CHECK_FALSE(r.pass);
    CHECK(std::abs(r.nearby.change_pct[1]) < 1.5);
    CHECK(std::abs(r.distant.change_pct[1]) < 1.5);
}

TEST_CASE("dataset directory round trip") {
    testing::TempDir dir("synth");
    const auto& data = testing::small_dataset();
    const ScenarioConfig cfg;
    const auto manifest = write_dataset(data, cfg, dir.path());
    CHECK(manifest.contains("hurricanes"));
    const auto back = read_dataset(dir.path());
    REQUIRE(back.network.size() == data.network.size());
    REQUIRE(back.events.size() == data.events.size());
    for (std::size_t e = 0; e < data.events.size(); ++e) {
        CHECK(back.events[e].event.name == data.events[e].event.name);
        for (const auto& [id, s] : data.events[e].speeds) {
            const auto& t = back.events[e].speeds.at(id);
            CHECK(t.start == s.start);
            CHECK(t.values == s.values);
        }
    }
    CHECK_THROWS(read_dataset(dir / "missing"));
}
