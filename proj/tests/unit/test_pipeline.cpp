#include "evacast/core/error.hpp"
#include "evacast/pipeline/ablation.hpp"
#include "evacast/pipeline/config.hpp"
#include "evacast/pipeline/evaluate.hpp"
#include "evacast/pipeline/longterm.hpp"
#include "evacast/pipeline/predict.hpp"
#include "evacast/pipeline/result.hpp"
#include "evacast/pipeline/shortterm.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>

using namespace evacast;
using namespace evacast::pipeline;

namespace {

// Small, fast configuration over the shared small dataset.
ExperimentConfig quick_config() {
    ExperimentConfig c;
    c.data.n_links = 40;
    c.data.hurricanes = {"ida", "laura"};
    c.seeds = {1, 2};
    c.mlp_hidden = {16, 16};
    c.mlp_adam.epochs = 3;
    c.horizons = {1, 3};
    c.lstm_hidden = 8;
    c.lstm_layers = 1;
    c.rnn_hidden = 8;
    c.seq_adam.epochs = 1;
    c.max_train_sequences = 200;
    c.max_val_sequences = 100;
    return c;
}

const LongTermData& small_longterm() {
    static const LongTermData d = prepare_longterm(testing::small_dataset());
    return d;
}

} // namespace

TEST_CASE("experiment config JSON round trip and validation") {
    auto c = quick_config();
    c.data.scenario.noise_sd = 2.5;
    const auto back = experiment_config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    c.seeds = {1, 1};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = quick_config();
    c.horizons = {7};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = quick_config();
    c.data.hurricanes = {"katrina"};
    CHECK_THROWS_AS(c.validate(), ValidationError);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json::array()), ParseError);
}

TEST_CASE("generated data follows the data source") {
    const auto& d = testing::small_dataset();
    CHECK(d.network.size() == 40);
    REQUIRE(d.events.size() == 2);
    CHECK(d.events[0].event.name == "ida");
    CHECK(d.events[1].event.name == "laura");
}

TEST_CASE("long-term data preparation and feature dropping") {
    const auto& d = small_longterm();
    CHECK(d.names == features::longterm_feature_names());
    CHECK(d.samples.size() == d.labels.size());
    CHECK(d.samples.size() + d.excluded.total() == 40u * 28u * 2u);
    CHECK(d.n_hurricanes == 2);

    const auto dropped = drop_features(d, {"distance_to_landfall", "slots_to_landfall"});
    CHECK(dropped.names.size() == 12);
    CHECK(std::find(dropped.names.begin(), dropped.names.end(), "time_to_landfall") == dropped.names.end());
    CHECK(dropped.samples[0].features.size() == 12);
    try {
        drop_features(d, {"wind_speed"});
        FAIL("unknown feature accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("wind_speed") != std::string::npos);
    }
    CHECK_THROWS_AS(drop_features(d, d.names), ValidationError);
}

TEST_CASE("long-term experiment: one row per repeat for MLP and KNN") {
    const auto r = run_longterm_experiment(small_longterm(), quick_config());
    CHECK(r.task == "long");
    CHECK(r.seeds == std::vector<std::uint64_t>{1, 2});
    for (const auto* name : {"MLP", "KNN"}) {
        const auto& m = r.model(name);
        CHECK(m.report.repeats.size() == 2);
        const double acc = m.report.at("accuracy").mean;
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
    }
    CHECK(r.warnings.empty());
    const auto back = experiment_result_from_json(to_json(r));
    CHECK(to_json(back) == to_json(r));
    CHECK(format_result(r).find("MLP") != std::string::npos);
}

TEST_CASE("single-hurricane data records a warning") {
    pipeline::DataSource src;
    src.n_links = 30;
    src.hurricanes = {"ida"};
    const auto data = load_or_generate(src);
    const auto r = run_longterm_experiment(data, quick_config());
    CHECK(r.warnings.size() == 1);
}

TEST_CASE("ablation with nothing dropped changes nothing") {
    const auto r = run_ablation(small_longterm(), quick_config(), {});
    CHECK(r.delta_accuracy == 0.0);
    CHECK(to_json(r.full) == to_json(r.ablated));
    CHECK_THROWS_AS(run_ablation(small_longterm(), quick_config(), {"wind_speed"}), ValidationError);
}

TEST_CASE("short-term experiment: sections per horizon and model") {
    const auto r = run_shortterm_experiment(testing::small_dataset(), quick_config());
    REQUIRE(r.horizons.size() == 2);
    CHECK(r.horizons[0].horizon_h == 1);
    CHECK(r.horizons[1].horizon_h == 3);
    for (const auto& h : r.horizons) {
        std::vector<std::string> names;
        for (const auto& m : h.models) names.push_back(m.model);
        CHECK(names == std::vector<std::string>{"LSTM", "RNN", "Persistence"});
        for (const auto& m : h.models) CHECK(m.report.repeats.size() == 2);
    }
    CHECK(r.model(3, "LSTM").report.at("rmse").mean > 0.0);
}

TEST_CASE("short-term split: heavy-link test windows and balanced capped training") {
    const auto set = features::build_shortterm_set(testing::small_dataset(), 1);
    const auto cfg = quick_config();
    const auto sp = split_shortterm(set, cfg, 1);
    CHECK(sp.train.size() <= cfg.max_train_sequences);
    CHECK(sp.val.size() <= cfg.max_val_sequences);
    for (const auto w : sp.test) CHECK(set.tables[set.windows[w].table].has_heavy);
    const auto again = split_shortterm(set, cfg, 1);
    CHECK(again.train == sp.train);
    CHECK(again.test == sp.test);
}

TEST_CASE("congestion grid") {
    const auto& data = testing::small_dataset();
    const auto cfg = quick_config();
    const auto art = train_longterm_model(small_longterm(), cfg, 1);
    const auto h = data.events[0].event;
    const auto stats = features::compute_regular_stats_table(data.network, h, data.events[0].speeds).stats;
    const auto g = predict_congestion_grid(art, data.network, h, stats);
    REQUIRE(g.rows.size() == 40);
    CHECK(g.hurricane == "ida");
    for (const auto& row : g.rows)
        for (int p = 0; p < features::kEventPeriods; ++p) {
            const auto& pr = row.probabilities[static_cast<std::size_t>(p)];
            const auto arg = std::max_element(pr.begin(), pr.end()) - pr.begin();
            CHECK(static_cast<int>(row.labels[static_cast<std::size_t>(p)]) == arg);
        }
    CHECK(g.period_starts[0] == features::event_window(h).start);
    const auto again = predict_congestion_grid(art, data.network, h, stats);
    CHECK(grid_to_json(again) == grid_to_json(g));

    const auto geo = grid_to_geojson(g, data.network);
    REQUIRE(geo["features"].size() == 40);
    CHECK(geo["features"][0]["properties"]["labels"].size() == 28);

    // ablated models cannot drive the grid
    auto cfg2 = cfg;
    const auto ablated = train_longterm_model(drop_features(small_longterm(), {"lanes"}), cfg2, 1);
    CHECK_THROWS_AS(predict_congestion_grid(ablated, data.network, h, stats), ValidationError);
    // the saved model scores its own test split
    const auto rep = evaluate_longterm_model(ablated, small_longterm(), 1);
    CHECK(rep.n > 0);
}

TEST_CASE("reference regular stats average the events") {
    const auto& data = testing::small_dataset();
    const auto ref = reference_regular_stats(data);
    const auto& id = data.network.links()[0].link_id;
    const auto a = features::compute_regular_stats_table(data.network, data.events[0].event, data.events[0].speeds);
    const auto b = features::compute_regular_stats_table(data.network, data.events[1].event, data.events[1].speeds);
    CHECK(ref.at(id).mean_7d == doctest::Approx((a.stats.at(id).mean_7d + b.stats.at(id).mean_7d) / 2.0));
}

TEST_CASE("heavy coverage on a hand-made grid") {
    using features::CongestionLabel;
    CongestionGrid g;
    g.rows.resize(2);
    g.rows[0].link_id = "A";
    g.rows[1].link_id = "B";
    std::map<std::string, features::PeriodLabels> truth;
    for (int p = 0; p < 28; ++p) {
        truth["A"][static_cast<std::size_t>(p)] = CongestionLabel::NoCongestion;
        truth["B"][static_cast<std::size_t>(p)] = CongestionLabel::NoCongestion;
    }
    truth["A"][8] = truth["A"][9] = truth["B"][9] = CongestionLabel::HeavyCongestion;
    truth["B"][20] = CongestionLabel::HeavyCongestion; // outside the day
    g.rows[0].labels[8] = CongestionLabel::HeavyCongestion;
    g.rows[1].labels[9] = CongestionLabel::HeavyCongestion;
    const auto c = heavy_coverage(g, truth);
    CHECK(c.true_heavy == 3);
    CHECK(c.covered == 2);
    CHECK(c.fraction() == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(heavy_coverage(g, truth, 5, 30), ValidationError);
}

TEST_CASE("speed prediction with an interval") {
    const auto& data = testing::small_dataset();
    auto cfg = quick_config();
    auto art = train_shortterm_model(data, cfg, 1, models::CellType::Lstm, 1);
    CHECK(art.horizon_h == 1);
    const auto& ev = data.events[0];
    const auto& link = data.network.links()[0];
    const auto stats = features::compute_regular_stats_table(data.network, ev.event, ev.speeds).stats.at(link.link_id);
    auto history = ev.speeds.at(link.link_id);
    history.values.resize(history.size() - 30);

    const auto a = predict_speed_with_ci(art, history, link, ev.event, stats, 40, 5);
    const auto b = predict_speed_with_ci(art, history, link, ev.event, stats, 40, 5);
    CHECK(a.mean == b.mean);
    CHECK(a.ci95_low == b.ci95_low);
    CHECK(a.target_time == history.end() - Hours{1} + Hours{1});
    CHECK(a.ci95_low <= a.mean);
    CHECK(a.ci95_high >= a.mean);
    CHECK(prediction_to_json(a).contains("ci95_high"));

    // zero dropout: degenerate interval
    cfg.lstm_dropout = 0.0;
    const auto det = train_shortterm_model(data, cfg, 1, models::CellType::Lstm, 1);
    const auto d = predict_speed_with_ci(det, history, link, ev.event, stats, 40, 5);
    CHECK(d.std == 0.0);
    CHECK(d.ci95_high == d.ci95_low);

    auto short_hist = history;
    short_hist.values.resize(23);
    try {
        predict_speed_with_ci(art, short_hist, link, ev.event, stats);
        FAIL("short history accepted");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("history length") != std::string::npos);
    }
    const auto sev = evaluate_shortterm_model(art, data, cfg, 1);
    CHECK(sev.n_test > 0);
    CHECK(sev.model.n_evaluated == sev.n_test);
}
