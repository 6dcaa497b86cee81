#include "evacast/dataset/repeats.hpp"

#include "evacast/core/error.hpp"
#include "evacast/core/rng.hpp"

#include <set>
#include <string>

namespace evacast::dataset {

ExperimentPlan::ExperimentPlan() : ExperimentPlan({1, 2, 3, 4, 5}) {}

ExperimentPlan::ExperimentPlan(std::vector<std::uint64_t> seeds) : seeds_(std::move(seeds)) {
    if (seeds_.empty()) throw ValidationError("experiment plan needs at least one seed");
    std::set<std::uint64_t> seen;
    for (const auto s : seeds_)
        if (!seen.insert(s).second) throw ValidationError("experiment plan: duplicate seed " + std::to_string(s));
}

RepeatContext prepare_repeat(std::size_t repeat, std::uint64_t seed, std::size_t n_samples,
                             const std::vector<CongestionLabel>& labels, const RepeatOptions& opts) {
    RepeatContext ctx;
    ctx.repeat = repeat;
    ctx.seed = seed;
    SplitSpec spec = opts.split;
    spec.seed = seed;
    ctx.split = split(n_samples, labels, spec);
    if (opts.balance) {
        if (labels.size() != n_samples) throw ValidationError("balancing needs one label per sample");
        ctx.train = oversample_minority(labels, ctx.split.train, derive_seed(seed, 0x62616c));
    } else {
        ctx.train = ctx.split.train;
    }
    if (opts.fit_normalizer) ctx.normalization = opts.fit_normalizer(ctx.train);
    return ctx;
}

void rethrow_with_repeat(std::size_t repeat, std::uint64_t seed) {
    const std::string prefix = "repeat " + std::to_string(repeat) + " (seed " + std::to_string(seed) + "): ";
    try {
        throw;
    } catch (const IncompatibleVersionError& e) {
        throw IncompatibleVersionError(prefix + e.what());
    } catch (const ParseError& e) {
        throw ParseError(prefix + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(prefix + e.what());
    } catch (const TrainingError& e) {
        throw TrainingError(prefix + e.what());
    } catch (const std::exception& e) {
        throw Error(prefix + e.what());
    }
}

} // namespace evacast::dataset
