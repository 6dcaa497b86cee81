#pragma once

#include "evacast/models/recurrent.hpp"
#include "evacast/models/train.hpp"

#include <cstdint>
#include <vector>

namespace evacast::models {

inline constexpr std::size_t kDefaultMcPasses = 50;
inline constexpr double kZ95 = 1.96;

struct McPrediction {
    double mean = 0.0;
    double std = 0.0; // population (1/T)
    double ci95_low = 0.0;
    double ci95_high = 0.0;
};

// T stochastic passes with dropout active over a single sequence (batch of 1).
// Outputs are mapped through y * scale + shift before the statistics, so a
// normalized-speed model can report mph directly.
McPrediction mc_dropout_predict(const SequenceModel& model, const SequenceBatch& seq,
                                std::size_t passes = kDefaultMcPasses, std::uint64_t seed = 0,
                                double scale = 1.0, double shift = 0.0);

// Every item of a source; item i uses the stream derive_seed(seed, i).
std::vector<McPrediction> mc_dropout_predict(const SequenceModel& model, const SequenceSource& src,
                                             std::size_t passes = kDefaultMcPasses, std::uint64_t seed = 0,
                                             double scale = 1.0, double shift = 0.0);

} // namespace evacast::models
