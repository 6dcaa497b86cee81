#pragma once

#include "evacast/dataset/split.hpp"
#include "evacast/features/normalize.hpp"

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <vector>

namespace evacast::dataset {

// Repeated random splits, one per seed. (Reported as "folds" in tables, but
// these are independent stratified resplits, not a k-fold partition.)
class ExperimentPlan {
public:
    ExperimentPlan(); // seeds 1..5
    explicit ExperimentPlan(std::vector<std::uint64_t> seeds);

    std::size_t n_repeats() const { return seeds_.size(); }
    const std::vector<std::uint64_t>& seeds() const { return seeds_; }

private:
    std::vector<std::uint64_t> seeds_;
};

inline constexpr std::size_t kDefaultRepeats = 5;

struct RepeatContext {
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
    SplitIndices split;
    std::vector<std::size_t> train; // balanced when requested, else split.train
    std::optional<features::NormalizationStats> normalization;
};

struct RepeatOptions {
    SplitSpec split;      // seed is replaced by each plan seed
    bool balance = true;  // oversample the training split by label
    // Fits the normalizer on the (balanced) training indices; skipped when empty.
    std::function<features::NormalizationStats(const std::vector<std::size_t>&)> fit_normalizer;
};

// Builds the per-repeat context: split, balance (training only), then fit.
RepeatContext prepare_repeat(std::size_t repeat, std::uint64_t seed, std::size_t n_samples,
                             const std::vector<CongestionLabel>& labels, const RepeatOptions& opts);

// Rethrows the in-flight exception with "repeat i (seed s): " prefixed,
// keeping its library error category.
[[noreturn]] void rethrow_with_repeat(std::size_t repeat, std::uint64_t seed);

template <class Report>
std::vector<Report> run_repeats(std::size_t n_samples, const std::vector<CongestionLabel>& labels,
                                const ExperimentPlan& plan, const RepeatOptions& opts,
                                const std::function<Report(const RepeatContext&)>& experiment) {
    std::vector<Report> reports;
    reports.reserve(plan.n_repeats());
    for (std::size_t r = 0; r < plan.n_repeats(); ++r) {
        const std::uint64_t seed = plan.seeds()[r];
        try {
            reports.push_back(experiment(prepare_repeat(r, seed, n_samples, labels, opts)));
        } catch (...) {
            rethrow_with_repeat(r, seed);
        }
    }
    return reports;
}

} // namespace evacast::dataset
