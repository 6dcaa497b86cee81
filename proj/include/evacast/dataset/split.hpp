#pragma once

#include "evacast/features/spi.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace evacast::dataset {

using features::CongestionLabel;

struct SplitSpec {
    double train = 0.6;
    double val = 0.2;
    double test = 0.2;
    bool stratified = true;
    std::uint64_t seed = 1;

    void validate() const; // ratios in [0,1] summing to 1
};

// Indices into the original sample list, each split sorted ascending.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

// Per class: round(val * n_c) to val, round(test * n_c) to test, the rest to
// train, after a seeded shuffle. Throws when a class has no sample.
SplitIndices stratified_split(const std::vector<CongestionLabel>& labels, const SplitSpec& spec);

// Unstratified: round(val * n), round(test * n), rest to train.
SplitIndices random_split(std::size_t n, const SplitSpec& spec);

// Dispatches on spec.stratified (labels are ignored when false).
SplitIndices split(std::size_t n, const std::vector<CongestionLabel>& labels, const SplitSpec& spec);

// Training indices plus random duplicates (with replacement) until every class
// matches the majority count. Throws when a class is absent from `train`.
std::vector<std::size_t> oversample_minority(const std::vector<CongestionLabel>& labels,
                                             const std::vector<std::size_t>& train, std::uint64_t seed);

// At most max_n of `indices`, keeping class proportions (largest remainder).
std::vector<std::size_t> stratified_subsample(const std::vector<CongestionLabel>& labels,
                                              const std::vector<std::size_t>& indices, std::size_t max_n,
                                              std::uint64_t seed);

// Per-class counts over the given indices.
std::vector<std::size_t> class_counts(const std::vector<CongestionLabel>& labels,
                                      const std::vector<std::size_t>& indices);

template <class T>
std::vector<T> select(const std::vector<T>& items, const std::vector<std::size_t>& indices) {
    std::vector<T> out;
    out.reserve(indices.size());
    for (const auto i : indices) out.push_back(items[i]);
    return out;
}

} // namespace evacast::dataset
