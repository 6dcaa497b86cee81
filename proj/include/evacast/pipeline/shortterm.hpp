#pragma once

#include "evacast/features/normalize.hpp"
#include "evacast/features/samples.hpp"
#include "evacast/models/serialize.hpp"
#include "evacast/models/train.hpp"
#include "evacast/pipeline/config.hpp"
#include "evacast/pipeline/longterm.hpp"
#include "evacast/pipeline/result.hpp"

#include <vector>

namespace evacast::pipeline {

// Normalized view of selected windows of a ShortTermSet; targets are the
// normalized speed.
class WindowSource : public models::SequenceSource {
public:
    WindowSource(const features::ShortTermSet& set, std::vector<std::size_t> windows,
                 const features::NormalizationStats& norm);

    std::size_t size() const override { return windows_.size(); }
    std::size_t steps() const override { return set_.window_len; }
    std::size_t width() const override { return features::kShortTermWidth; }
    void fill(std::span<const std::size_t> idx, models::SequenceBatch& xs, models::Vector* y) const override;

    std::size_t window(std::size_t i) const { return windows_[i]; }

private:
    const features::ShortTermSet& set_;
    std::vector<std::size_t> windows_;
    const features::NormalizationStats& norm_;
};

// Step-column normalizer over every step of the given windows.
features::NormalizationStats fit_step_normalizer(const features::ShortTermSet& set,
                                                 const std::vector<std::size_t>& windows);

// Windows of links with at least one Heavy period in their event window.
std::vector<std::size_t> heavy_windows(const features::ShortTermSet& set);

struct ShortTermSplit {
    std::vector<std::size_t> train; // balanced by target state, then capped
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;  // heavy-link windows only
};

// Split the pool 6:2:2 at random with `seed`, balance training by target
// state, and apply the configured caps. Indices refer to set windows.
ShortTermSplit split_shortterm(const features::ShortTermSet& set, const ExperimentConfig& cfg, std::uint64_t seed);

models::SequenceShape sequence_shape(const ExperimentConfig& cfg, models::CellType cell);

// LSTM, vanilla RNN and persistence per (repeat, horizon), evaluated on heavy-link windows.
ExperimentResult run_shortterm_experiment(const domain::EvacuationData& data, const ExperimentConfig& cfg,
                                          const Logger& log = {});

// One deployable sequence model for a horizon.
models::SequenceArtifact train_shortterm_model(const domain::EvacuationData& data, const ExperimentConfig& cfg,
                                               int horizon_h, models::CellType cell, std::uint64_t seed,
                                               models::TrainHistory* history = nullptr);

} // namespace evacast::pipeline
