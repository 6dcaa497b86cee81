#pragma once

#include "evacast/metrics/aggregate.hpp"

#include <string>
#include <utility>
#include <vector>

namespace evacast::metrics {

// "0.820 ± 0.012"
std::string format_mean_std(const MetricSummary& m, int digits = 3);

// Model | Label | Precision | Recall | F1 score | Accuracy, one block per model.
std::string format_classification_table(const std::vector<std::pair<std::string, AggregatedReport>>& models);

struct HorizonRow {
    int horizon_h = 1;
    std::string model;
    AggregatedReport report;
};

// Horizon (hour) | Model | RMSE (mi/h) | MAE (mi/h) | MAPE (%)
std::string format_regression_table(const std::vector<HorizonRow>& rows);

// One row per repeat plus a "Mean ± Std" row over the named metrics.
std::string format_repeat_table(const AggregatedReport& r, const std::vector<std::string>& metrics);

} // namespace evacast::metrics
