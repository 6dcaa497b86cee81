#include "evacast/features/normalize.hpp"

#include "evacast/core/error.hpp"

#include <cmath>

namespace evacast::features {

void NormalizationStats::apply(std::span<double> row) const {
    for (std::size_t c = 0; c < row.size(); ++c) {
        row[c] = (row[c] - mean[c]) / stddev[c];
    }
}

void NormalizationStats::invert(std::span<double> row) const {
    for (std::size_t c = 0; c < row.size(); ++c) {
        row[c] = row[c] * stddev[c] + mean[c];
    }
}

NormalizationStats fit_normalizer(std::size_t n_rows, const RowAccessor& row, std::vector<bool> passthrough) {
    if (n_rows == 0) {
        throw ValidationError("cannot fit a normalizer on an empty training set");
    }
    const std::size_t dim = passthrough.size();
    NormalizationStats stats{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0), std::move(passthrough)};
    for (std::size_t i = 0; i < n_rows; ++i) {
        const double* r = row(i);
        for (std::size_t c = 0; c < dim; ++c) {
            stats.mean[c] += r[c];
        }
    }
    for (auto& m : stats.mean) {
        m /= static_cast<double>(n_rows);
    }
    for (std::size_t i = 0; i < n_rows; ++i) {
        const double* r = row(i);
        for (std::size_t c = 0; c < dim; ++c) {
            const double d = r[c] - stats.mean[c];
            stats.stddev[c] += d * d;
        }
    }
    for (std::size_t c = 0; c < dim; ++c) {
        const double sd = std::sqrt(stats.stddev[c] / static_cast<double>(n_rows));
        if (stats.passthrough[c]) {
            stats.mean[c] = 0.0;
            stats.stddev[c] = 1.0;
        } else {
            stats.stddev[c] = (sd > 1e-12 && std::isfinite(sd)) ? sd : 1.0;
        }
    }
    return stats;
}

NormalizationStats fit_normalizer(const std::vector<LongTermSample>& train, const std::vector<std::string>& names) {
    if (train.empty()) {
        throw ValidationError("cannot fit a normalizer on an empty training set");
    }
    if (train.front().features.size() != names.size()) {
        throw ValidationError("feature width " + std::to_string(train.front().features.size()) +
                              " does not match schema width " + std::to_string(names.size()));
    }
    return fit_normalizer(
        train.size(), [&](std::size_t i) { return train[i].features.data(); }, passthrough_mask(names));
}

std::vector<LongTermSample> apply_normalizer(const NormalizationStats& stats, std::vector<LongTermSample> samples) {
    for (auto& s : samples) {
        if (s.features.size() != stats.dim()) {
            throw ValidationError("sample width does not match normalization stats");
        }
        stats.apply(s.features);
    }
    return samples;
}

nlohmann::json normalization_to_json(const NormalizationStats& stats) {
    return {{"mean", stats.mean}, {"std", stats.stddev}, {"passthrough", stats.passthrough}};
}

NormalizationStats normalization_from_json(const nlohmann::json& j) {
    NormalizationStats s;
    try {
        s.mean = j.at("mean").get<std::vector<double>>();
        s.stddev = j.at("std").get<std::vector<double>>();
        s.passthrough = j.at("passthrough").get<std::vector<bool>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("normalization block malformed: ") + e.what());
    }
    if (s.mean.size() != s.stddev.size() || s.mean.size() != s.passthrough.size()) {
        throw ParseError("normalization block has inconsistent widths");
    }
    return s;
}

} // namespace evacast::features
