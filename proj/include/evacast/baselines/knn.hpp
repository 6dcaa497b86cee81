#pragma once

#include "evacast/features/spi.hpp"
#include "evacast/models/tensor.hpp"

#include <span>
#include <vector>

namespace evacast::baselines {

using features::CongestionLabel;

inline constexpr std::size_t kDefaultK = 5;

// Brute-force Euclidean KNN over normalized feature rows.
class KnnIndex {
public:
    KnnIndex(models::Matrix points, std::vector<CongestionLabel> labels, std::size_t k = kDefaultK);

    std::size_t size() const { return labels_.size(); }
    std::size_t k() const { return k_; }
    std::size_t dim() const { return static_cast<std::size_t>(points_.cols()); }

    // Majority among the k nearest (neighbours ordered by distance, then label
    // code). Ties go to the smallest mean distance, then the lowest code.
    CongestionLabel classify(std::span<const double> query) const;
    std::vector<CongestionLabel> classify_all(const models::Matrix& queries) const;

private:
    models::Matrix points_;
    std::vector<CongestionLabel> labels_;
    std::size_t k_;
};

CongestionLabel knn_classify(const KnnIndex& index, std::span<const double> query);

} // namespace evacast::baselines
