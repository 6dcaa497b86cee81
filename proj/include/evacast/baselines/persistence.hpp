#pragma once

#include "evacast/features/samples.hpp"

namespace evacast::baselines {

// Last observed speed, whatever the horizon.
double persistence_forecast(const features::ShortTermSequence& seq);
double persistence_forecast(const features::ShortTermSet& set, std::size_t window);

} // namespace evacast::baselines
