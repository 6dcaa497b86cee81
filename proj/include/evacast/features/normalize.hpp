#pragma once

#include "evacast/features/samples.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace evacast::features {

// Per-column z-score parameters. Passthrough columns (one-hot) keep mean 0 and
// std 1 so applying them is the identity; constant columns get std 1.
struct NormalizationStats {
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<bool> passthrough;

    std::size_t dim() const { return mean.size(); }
    double normalize(std::size_t col, double v) const { return (v - mean[col]) / stddev[col]; }
    double denormalize(std::size_t col, double z) const { return z * stddev[col] + mean[col]; }
    void apply(std::span<double> row) const;
    void invert(std::span<double> row) const;
};

using RowAccessor = std::function<const double*(std::size_t)>;

// Two-pass population mean/std over n_rows rows of width passthrough.size().
NormalizationStats fit_normalizer(std::size_t n_rows, const RowAccessor& row, std::vector<bool> passthrough);

// Over the feature vectors of training samples; direction one-hot columns are
// detected from `names` (defaults to the full long-term schema).
NormalizationStats fit_normalizer(const std::vector<LongTermSample>& train,
                                  const std::vector<std::string>& names = longterm_feature_names());

std::vector<LongTermSample> apply_normalizer(const NormalizationStats& stats, std::vector<LongTermSample> samples);

nlohmann::json normalization_to_json(const NormalizationStats& stats);
NormalizationStats normalization_from_json(const nlohmann::json& j);

} // namespace evacast::features
