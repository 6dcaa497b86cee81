#include "evacast/dataset/split.hpp"

#include "evacast/core/error.hpp"
#include "evacast/core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evacast::dataset {

namespace {

constexpr std::uint64_t kStreamSplit = 0x73706c;
constexpr std::uint64_t kStreamOversample = 0x6f7673;
constexpr std::uint64_t kStreamSubsample = 0x737562;

std::size_t round_count(double frac, std::size_t n) {
    return static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
}

std::array<std::vector<std::size_t>, features::kNumClasses> by_class(const std::vector<CongestionLabel>& labels,
                                                                     const std::vector<std::size_t>& indices) {
    std::array<std::vector<std::size_t>, features::kNumClasses> out;
    for (const auto i : indices) {
        if (i >= labels.size()) throw ValidationError("sample index out of range");
        out[static_cast<std::size_t>(labels[i])].push_back(i);
    }
    return out;
}

void assign(std::vector<std::size_t> idx, const SplitSpec& spec, Rng& rng, SplitIndices& out) {
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::size_t n = idx.size();
    const std::size_t n_test = std::min(n, round_count(spec.test, n));
    const std::size_t n_val = std::min(n - n_test, round_count(spec.val, n));
    out.test.insert(out.test.end(), idx.begin(), idx.begin() + static_cast<long>(n_test));
    out.val.insert(out.val.end(), idx.begin() + static_cast<long>(n_test),
                   idx.begin() + static_cast<long>(n_test + n_val));
    out.train.insert(out.train.end(), idx.begin() + static_cast<long>(n_test + n_val), idx.end());
}

void sort_all(SplitIndices& s) {
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
}

} // namespace

void SplitSpec::validate() const {
    for (double r : {train, val, test})
        if (!(r >= 0.0 && r <= 1.0)) throw ValidationError("split ratios must lie in [0, 1]");
    if (std::abs(train + val + test - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");
}

SplitIndices stratified_split(const std::vector<CongestionLabel>& labels, const SplitSpec& spec) {
    spec.validate();
    std::vector<std::size_t> all(labels.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const auto groups = by_class(labels, all);
    for (std::size_t c = 0; c < groups.size(); ++c)
        if (groups[c].empty())
            throw ValidationError("stratified split: class " + features::to_string(static_cast<CongestionLabel>(c)) +
                                  " has no samples");
    SplitIndices out;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        Rng rng(derive_seed(spec.seed, kStreamSplit, c));
        assign(groups[c], spec, rng, out);
    }
    sort_all(out);
    return out;
}

SplitIndices random_split(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    if (n == 0) throw ValidationError("random split: no samples");
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    SplitIndices out;
    Rng rng(derive_seed(spec.seed, kStreamSplit, 99));
    assign(std::move(all), spec, rng, out);
    sort_all(out);
    return out;
}

SplitIndices split(std::size_t n, const std::vector<CongestionLabel>& labels, const SplitSpec& spec) {
    if (!spec.stratified) return random_split(n, spec);
    if (labels.size() != n) throw ValidationError("stratified split: label count does not match sample count");
    return stratified_split(labels, spec);
}

std::vector<std::size_t> oversample_minority(const std::vector<CongestionLabel>& labels,
                                             const std::vector<std::size_t>& train, std::uint64_t seed) {
    const auto groups = by_class(labels, train);
    std::size_t majority = 0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (groups[c].empty())
            throw ValidationError("oversampling: class " + features::to_string(static_cast<CongestionLabel>(c)) +
                                  " is absent from the training split");
        majority = std::max(majority, groups[c].size());
    }
    std::vector<std::size_t> out = train;
    out.reserve(majority * groups.size());
    for (std::size_t c = 0; c < groups.size(); ++c) {
        Rng rng(derive_seed(seed, kStreamOversample, c));
        const auto& g = groups[c];
        std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
        for (std::size_t k = g.size(); k < majority; ++k) out.push_back(g[pick(rng)]);
    }
    return out;
}

std::vector<std::size_t> stratified_subsample(const std::vector<CongestionLabel>& labels,
                                              const std::vector<std::size_t>& indices, std::size_t max_n,
                                              std::uint64_t seed) {
    if (indices.size() <= max_n) return indices;
    auto groups = by_class(labels, indices);
    const double n = static_cast<double>(indices.size());
    std::array<std::size_t, features::kNumClasses> take{};
    std::array<double, features::kNumClasses> rem{};
    std::size_t taken = 0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        const double exact = static_cast<double>(max_n) * static_cast<double>(groups[c].size()) / n;
        take[c] = static_cast<std::size_t>(std::floor(exact));
        rem[c] = exact - static_cast<double>(take[c]);
        taken += take[c];
    }
    while (taken < max_n) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < rem.size(); ++c)
            if (rem[c] > rem[best]) best = c;
        ++take[best];
        rem[best] = -1.0;
        ++taken;
    }
    std::vector<std::size_t> out;
    out.reserve(max_n);
    for (std::size_t c = 0; c < groups.size(); ++c) {
        Rng rng(derive_seed(seed, kStreamSubsample, c));
        std::shuffle(groups[c].begin(), groups[c].end(), rng);
        out.insert(out.end(), groups[c].begin(), groups[c].begin() + static_cast<long>(take[c]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> class_counts(const std::vector<CongestionLabel>& labels,
                                      const std::vector<std::size_t>& indices) {
    std::vector<std::size_t> counts(features::kNumClasses, 0);
    for (const auto i : indices) ++counts[static_cast<std::size_t>(labels.at(i))];
    return counts;
}

} // namespace evacast::dataset
