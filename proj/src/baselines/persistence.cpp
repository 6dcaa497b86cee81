#include "evacast/baselines/persistence.hpp"

#include "evacast/core/error.hpp"

namespace evacast::baselines {

double persistence_forecast(const features::ShortTermSequence& seq) {
    if (seq.steps.empty()) throw ValidationError("persistence: empty sequence");
    return seq.steps.back().at(features::kSpeedColumn);
}

double persistence_forecast(const features::ShortTermSet& set, std::size_t window) { return set.last_speed(window); }

} // namespace evacast::baselines
