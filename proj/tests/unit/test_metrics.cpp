#include "evacast/core/error.hpp"
#include "evacast/metrics/aggregate.hpp"
#include "evacast/metrics/classification.hpp"
#include "evacast/metrics/regression.hpp"
#include "evacast/metrics/report_text.hpp"

#include <doctest.h>

#include <cmath>

using namespace evacast;
using namespace evacast::metrics;
using features::CongestionLabel;

namespace {
constexpr auto N = CongestionLabel::NoCongestion;
constexpr auto L = CongestionLabel::LightCongestion;
constexpr auto H = CongestionLabel::HeavyCongestion;
} // namespace

TEST_CASE("binary metrics by hand") {
    const auto m = binary_metrics(8, 2, 2, 88);
    CHECK(m.precision == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(m.recall == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(m.f1 == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(m.accuracy == doctest::Approx(0.96).epsilon(1e-15));
    const auto none = binary_metrics(0, 0, 3, 7);
    CHECK(none.precision == 0.0);
    CHECK(none.precision_undefined);
    CHECK(none.f1 == 0.0);
}

TEST_CASE("classification report") {
    const std::vector<CongestionLabel> truth{N, N, L, H, H, L};
    auto r = classification_report(truth, truth);
    CHECK(r.accuracy == 1.0);
    for (const auto& m : r.per_class) {
        CHECK(m.precision == 1.0);
        CHECK(m.recall == 1.0);
        CHECK(m.f1 == 1.0);
    }
    CHECK(r.support == std::array<std::size_t, 3>{2, 2, 2});

    r = classification_report(truth, std::vector<CongestionLabel>(6, H));
    CHECK(r.per_class[2].recall == 1.0);
    CHECK(r.per_class[0].recall == 0.0);
    CHECK(r.per_class[1].recall == 0.0);
    CHECK(r.per_class[2].precision == doctest::Approx(1.0 / 3.0));
    CHECK(r.accuracy == doctest::Approx(1.0 / 3.0));

    const auto cm = confusion_matrix(truth, {N, L, L, H, N, H});
    CHECK(cm.counts[0][1] == 1);
    CHECK(cm.counts[2][0] == 1);
    CHECK(cm.trace() == 3);
    CHECK(cm.fp(2) == 1);
    CHECK(cm.fn(0) == 1);
    CHECK(cm.tn(0) == 3);
    CHECK_THROWS_AS(confusion_matrix(truth, {N}), ValidationError);
}

TEST_CASE("regression metrics by hand") {
    auto r = regression_report({50, 100}, {50, 100});
    CHECK(r.rmse == 0.0);
    CHECK(r.mae == 0.0);
    CHECK(*r.mape == 0.0);

    r = regression_report({50, 100}, {45, 110});
    CHECK(r.mae == doctest::Approx(7.5).epsilon(1e-15));
    CHECK(r.rmse == doctest::Approx(std::sqrt(62.5)).epsilon(1e-15));
    CHECK(std::abs(r.rmse - 7.906) < 5e-4);
    CHECK(*r.mape == doctest::Approx(10.0).epsilon(1e-15));

    r = regression_report({0.5}, {3.0}, 1.0);
    CHECK_FALSE(r.mape);
    CHECK(r.n_excluded == 1);
    CHECK(r.mae == 2.5);
    CHECK_THROWS_AS(regression_report({}, {}), ValidationError);
}

TEST_CASE("aggregation uses the population std") {
    std::vector<RepeatReport> reps;
    for (const double v : {8.259, 8.938, 8.919, 8.109, 8.227}) {
        RegressionReport r;
        r.rmse = v;
        r.mae = v / 2;
        r.mape = v * 2;
        reps.push_back(flatten(r));
    }
    const auto a = aggregate_repeats(reps);
    CHECK(std::abs(a.at("rmse").mean - 8.49) < 0.005);
    CHECK(std::abs(a.at("rmse").std - 0.36) < 0.005);
    // independent two-pass oracle
    const double mean = (8.259 + 8.938 + 8.919 + 8.109 + 8.227) / 5.0;
    double ss = 0;
    for (const double v : {8.259, 8.938, 8.919, 8.109, 8.227}) ss += (v - mean) * (v - mean);
    CHECK(a.at("rmse").mean == doctest::Approx(mean).epsilon(1e-14));
    CHECK(a.at("rmse").std == doctest::Approx(std::sqrt(ss / 5.0)).epsilon(1e-12));
    CHECK(a.at("mape").n == 5);

    const auto same = aggregate_repeats({reps[0], reps[0]});
    CHECK(same.at("rmse").std == 0.0);
    CHECK_THROWS_AS(aggregate_repeats({reps[0]}), ValidationError);
    CHECK_THROWS_AS(aggregate_repeats({reps[0], flatten(classification_report({N}, {N}))}), ValidationError);

    const auto back = aggregated_from_json(to_json(a));
    CHECK(back.at("rmse").mean == a.at("rmse").mean);
    CHECK(back.at("rmse").std == a.at("rmse").std);
    CHECK(back.repeats.size() == 5);
}

TEST_CASE("undefined MAPE is skipped per repeat") {
    RegressionReport a, b, c;
    a.mape = 4.0;
    c.mape = 6.0;
    const auto agg = aggregate_repeats({flatten(a), flatten(b), flatten(c)});
    CHECK(agg.at("mape").n == 2);
    CHECK(agg.at("mape").mean == 5.0);
    CHECK(agg.at("rmse").n == 3);
}

TEST_CASE("classification keys") {
    const auto f = flatten(classification_report({N, L, H}, {N, L, L}));
    REQUIRE(f.find("accuracy"));
    CHECK(*f.find("accuracy") == doctest::Approx(2.0 / 3.0));
    CHECK(*f.find("recall_heavy") == 0.0);
    CHECK(*f.find("precision_light") == 0.5);
    CHECK(f.find("rmse") == nullptr);
}

TEST_CASE("time-window filtering") {
    const auto lf = parse_timestamp("2021-08-29T16:55Z");
    const auto start = lf - Hours{96};
    std::vector<std::pair<std::string, Timestamp>> cells;
    for (int link = 0; link < 3; ++link)
        for (int p = 0; p < 28; ++p) cells.emplace_back("L" + std::to_string(link), start + Hours{6 * p});
    const auto of = [](const auto& c) { return c.second; };
    CHECK(filter_by_window(cells, start, start + Hours{168}, of).size() == cells.size());
    const auto after = filter_by_window(cells, lf, lf + Hours{72}, of);
    CHECK(after.size() == 3 * 12);
    CHECK(filter_by_window(cells, start - Hours{10}, start - Hours{5}, of).empty());
    CHECK_THROWS_AS(window_indices({}, lf, lf), ValidationError);
}

TEST_CASE("text tables") {
    MetricSummary m{"accuracy", 0.8204, 0.0123, 5};
    CHECK(format_mean_std(m) == "0.820 ± 0.012");
    std::vector<RepeatReport> reps;
    for (int i = 0; i < 5; ++i) reps.push_back(flatten(classification_report({N, L, H, H}, {N, L, H, L})));
    const auto agg = aggregate_repeats(reps);
    const auto t = format_repeat_table(agg, {"accuracy", "f1_heavy"});
    CHECK(t.find("Mean ± Std") != std::string::npos);
    const auto table = format_classification_table({{"MLP", agg}});
    CHECK(table.find("MLP") != std::string::npos);
    CHECK(table.find("Heavy") != std::string::npos);
}
