#include "evacast/metrics/aggregate.hpp"

#include "evacast/core/error.hpp"

#include <algorithm>
#include <cmath>

namespace evacast::metrics {

using nlohmann::json;

std::string to_string(ReportKind k) { return k == ReportKind::Classification ? "classification" : "regression"; }

std::string class_key(CongestionLabel c) {
    switch (c) {
    case CongestionLabel::NoCongestion: return "none";
    case CongestionLabel::LightCongestion: return "light";
    case CongestionLabel::HeavyCongestion: return "heavy";
    }
    return "?";
}

const double* RepeatReport::find(const std::string& name) const {
    for (const auto& [k, v] : values)
        if (k == name) return &v;
    return nullptr;
}

RepeatReport flatten(const ClassificationReport& r) {
    RepeatReport out{ReportKind::Classification, {}};
    out.values.emplace_back("accuracy", r.accuracy);
    for (const auto c : features::kLabels) {
        const auto& m = r.per_class[static_cast<std::size_t>(c)];
        out.values.emplace_back("precision_" + class_key(c), m.precision);
        out.values.emplace_back("recall_" + class_key(c), m.recall);
        out.values.emplace_back("f1_" + class_key(c), m.f1);
    }
    return out;
}

RepeatReport flatten(const RegressionReport& r) {
    RepeatReport out{ReportKind::Regression, {}};
    out.values.emplace_back("rmse", r.rmse);
    out.values.emplace_back("mae", r.mae);
    if (r.mape) out.values.emplace_back("mape", *r.mape);
    return out;
}

const MetricSummary* AggregatedReport::find(const std::string& name) const {
    for (const auto& m : metrics)
        if (m.name == name) return &m;
    return nullptr;
}

const MetricSummary& AggregatedReport::at(const std::string& name) const {
    const auto* m = find(name);
    if (!m) throw ValidationError("metric not in report: " + name);
    return *m;
}

AggregatedReport aggregate_repeats(const std::vector<RepeatReport>& reports) {
    if (reports.size() < 2) throw ValidationError("aggregation needs at least 2 repeat reports");
    AggregatedReport agg;
    agg.kind = reports.front().kind;
    for (const auto& r : reports)
        if (r.kind != agg.kind) throw ValidationError("cannot aggregate classification and regression reports together");
    agg.repeats = reports;

    std::vector<std::string> names;
    for (const auto& r : reports)
        for (const auto& [k, v] : r.values)
            if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
    for (const auto& name : names) {
        MetricSummary s;
        s.name = name;
        for (const auto& r : reports)
            if (const double* v = r.find(name)) {
                s.mean += *v;
                ++s.n;
            }
        s.mean /= static_cast<double>(s.n);
        for (const auto& r : reports)
            if (const double* v = r.find(name)) s.std += (*v - s.mean) * (*v - s.mean);
        s.std = std::sqrt(s.std / static_cast<double>(s.n));
        agg.metrics.push_back(s);
    }
    return agg;
}

json to_json(const ClassificationReport& r) {
    json per = json::object();
    for (const auto c : features::kLabels) {
        const auto i = static_cast<std::size_t>(c);
        const auto& m = r.per_class[i];
        per[class_key(c)] = {{"precision", m.precision},
                             {"recall", m.recall},
                             {"f1", m.f1},
                             {"support", r.support[i]},
                             {"precision_undefined", m.precision_undefined},
                             {"recall_undefined", m.recall_undefined}};
    }
    json cm = json::array();
    for (const auto& row : r.confusion.counts) cm.push_back(row);
    return {{"accuracy", r.accuracy}, {"n", r.n}, {"per_class", per}, {"confusion", cm}};
}

json to_json(const RegressionReport& r) {
    return {{"rmse", r.rmse},
            {"mae", r.mae},
            {"mape", r.mape ? json(*r.mape) : json(nullptr)},
            {"n_evaluated", r.n_evaluated},
            {"n_excluded", r.n_excluded}};
}

json to_json(const RepeatReport& r) {
    json v = json::array();
    for (const auto& [k, x] : r.values) v.push_back({k, x});
    return {{"kind", to_string(r.kind)}, {"values", v}};
}

json to_json(const AggregatedReport& r) {
    json reps = json::array();
    for (const auto& rep : r.repeats) reps.push_back(to_json(rep));
    json ms = json::array();
    for (const auto& m : r.metrics) ms.push_back({{"name", m.name}, {"mean", m.mean}, {"std", m.std}, {"n", m.n}});
    return {{"kind", to_string(r.kind)}, {"repeats", reps}, {"metrics", ms}};
}

AggregatedReport aggregated_from_json(const json& j) {
    try {
        AggregatedReport r;
        const auto kind = j.at("kind").get<std::string>();
        if (kind != "classification" && kind != "regression") throw ParseError("unknown report kind: " + kind);
        r.kind = kind == "classification" ? ReportKind::Classification : ReportKind::Regression;
        for (const auto& rep : j.at("repeats")) {
            RepeatReport rr{r.kind, {}};
            for (const auto& kv : rep.at("values")) rr.values.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<double>());
            r.repeats.push_back(std::move(rr));
        }
        for (const auto& m : j.at("metrics"))
            r.metrics.push_back({m.at("name").get<std::string>(), m.at("mean").get<double>(), m.at("std").get<double>(),
                                 m.at("n").get<std::size_t>()});
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("report malformed: ") + e.what());
    }
}

} // namespace evacast::metrics
