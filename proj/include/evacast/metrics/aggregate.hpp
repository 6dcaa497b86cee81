#pragma once

#include "evacast/metrics/classification.hpp"
#include "evacast/metrics/regression.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace evacast::metrics {

enum class ReportKind { Classification, Regression };
std::string to_string(ReportKind k);

// A report flattened to named scalars, in presentation order.
struct RepeatReport {
    ReportKind kind = ReportKind::Classification;
    std::vector<std::pair<std::string, double>> values;

    const double* find(const std::string& name) const;
};

// Metric keys: accuracy, {precision,recall,f1}_{none,light,heavy}.
RepeatReport flatten(const ClassificationReport& r);
// Metric keys: rmse, mae, mape (absent when undefined).
RepeatReport flatten(const RegressionReport& r);

std::string class_key(CongestionLabel c); // none | light | heavy

struct MetricSummary {
    std::string name;
    double mean = 0.0;
    double std = 0.0;    // population
    std::size_t n = 0;   // repeats that defined the metric
};

struct AggregatedReport {
    ReportKind kind = ReportKind::Classification;
    std::vector<RepeatReport> repeats;
    std::vector<MetricSummary> metrics;

    const MetricSummary& at(const std::string& name) const;
    const MetricSummary* find(const std::string& name) const;
};

// Mean and population std per metric. Needs >= 2 reports of one kind.
AggregatedReport aggregate_repeats(const std::vector<RepeatReport>& reports);

nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const RegressionReport& r);
nlohmann::json to_json(const RepeatReport& r);
nlohmann::json to_json(const AggregatedReport& r);
AggregatedReport aggregated_from_json(const nlohmann::json& j);

} // namespace evacast::metrics
