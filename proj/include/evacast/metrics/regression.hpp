#pragma once

#include "evacast/core/time.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace evacast::metrics {

inline constexpr double kMapeFloorMph = 1.0;

struct RegressionReport {
    double rmse = 0.0;          // mph, all samples
    double mae = 0.0;           // mph, all samples
    std::optional<double> mape; // percent over truths >= floor; empty when none qualify
    std::size_t n_evaluated = 0;
    std::size_t n_excluded = 0; // dropped from MAPE by the floor
};

RegressionReport regression_report(const std::vector<double>& truth, const std::vector<double>& pred,
                                   double mape_floor = kMapeFloorMph);

// Indices of records with t in [t_start, t_end). Throws when t_end <= t_start.
std::vector<std::size_t> window_indices(const std::vector<Timestamp>& times, Timestamp t_start, Timestamp t_end);

template <class T, class TimeOf>
std::vector<T> filter_by_window(const std::vector<T>& records, Timestamp t_start, Timestamp t_end, TimeOf time_of) {
    std::vector<Timestamp> times;
    times.reserve(records.size());
    for (const auto& r : records) times.push_back(time_of(r));
    std::vector<T> out;
    for (const auto i : window_indices(times, t_start, t_end)) out.push_back(records[i]);
    return out;
}

} // namespace evacast::metrics
