#include "evacast/baselines/knn.hpp"

#include "evacast/core/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace evacast::baselines {

KnnIndex::KnnIndex(models::Matrix points, std::vector<CongestionLabel> labels, std::size_t k)
    : points_(std::move(points)), labels_(std::move(labels)), k_(k) {
    if (labels_.empty()) throw ValidationError("knn: index is empty");
    if (static_cast<std::size_t>(points_.rows()) != labels_.size())
        throw ValidationError("knn: point and label counts differ");
    if (k_ == 0 || k_ > labels_.size()) throw ValidationError("knn: k must lie in [1, number of stored samples]");
}

CongestionLabel KnnIndex::classify(std::span<const double> query) const {
    if (query.size() != dim()) throw ValidationError("knn: query width does not match the index");
    const Eigen::Map<const models::RowVector> q(query.data(), static_cast<Eigen::Index>(query.size()));
    const Eigen::VectorXd d2 = (points_.rowwise() - q).rowwise().squaredNorm();

    std::vector<std::pair<double, int>> cand(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) cand[i] = {d2(static_cast<Eigen::Index>(i)), static_cast<int>(labels_[i])};
    std::nth_element(cand.begin(), cand.begin() + static_cast<long>(k_ - 1), cand.end());

    std::array<std::size_t, features::kNumClasses> votes{};
    std::array<double, features::kNumClasses> dist_sum{};
    for (std::size_t i = 0; i < k_; ++i) {
        ++votes[static_cast<std::size_t>(cand[i].second)];
        dist_sum[static_cast<std::size_t>(cand[i].second)] += std::sqrt(cand[i].first);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[best]) {
            best = c;
        } else if (votes[c] == votes[best] && votes[c] > 0) {
            const double mc = dist_sum[c] / static_cast<double>(votes[c]);
            const double mb = dist_sum[best] / static_cast<double>(votes[best]);
            if (mc < mb) best = c;
        }
    }
    return static_cast<CongestionLabel>(best);
}

std::vector<CongestionLabel> KnnIndex::classify_all(const models::Matrix& queries) const {
    std::vector<CongestionLabel> out;
    out.reserve(static_cast<std::size_t>(queries.rows()));
    for (Eigen::Index r = 0; r < queries.rows(); ++r)
        out.push_back(classify(std::span<const double>(queries.row(r).data(), static_cast<std::size_t>(queries.cols()))));
    return out;
}

CongestionLabel knn_classify(const KnnIndex& index, std::span<const double> query) { return index.classify(query); }

} // namespace evacast::baselines
