#pragma once

#include "evacast/pipeline/longterm.hpp"

namespace evacast::pipeline {

// Long-term experiment with all features versus without `drop`, same seeds.
// A precomputed full-feature result can be passed to skip that run.
AblationResult run_ablation(const LongTermData& d, const ExperimentConfig& cfg, const std::vector<std::string>& drop,
                            const ExperimentResult* full = nullptr, const Logger& log = {});

} // namespace evacast::pipeline
