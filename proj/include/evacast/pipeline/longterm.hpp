#pragma once

#include "evacast/features/samples.hpp"
#include "evacast/models/serialize.hpp"
#include "evacast/models/train.hpp"
#include "evacast/pipeline/config.hpp"
#include "evacast/pipeline/result.hpp"

#include <functional>
#include <string>
#include <vector>

namespace evacast::pipeline {

using Logger = std::function<void(const std::string&)>;

struct LongTermData {
    std::vector<features::LongTermSample> samples;
    std::vector<features::CongestionLabel> labels;
    std::vector<std::string> names; // feature columns of samples[i].features
    features::ExclusionCounts excluded;
    std::size_t n_hurricanes = 0;
};

LongTermData prepare_longterm(const domain::EvacuationData& data, const features::FeatureConfig& cfg = {});

// Copy without the named columns (aliases accepted). Throws on an unknown
// name, naming it, or when nothing would remain.
LongTermData drop_features(const LongTermData& d, const std::vector<std::string>& drop);

// Normalized rows of the given samples.
models::Matrix feature_matrix(const LongTermData& d, const std::vector<std::size_t>& idx,
                              const features::NormalizationStats& norm);
std::vector<int> label_codes(const LongTermData& d, const std::vector<std::size_t>& idx);

// MLP and KNN per repeat on stratified 6:2:2 splits with a balanced training split.
ExperimentResult run_longterm_experiment(const LongTermData& d, const ExperimentConfig& cfg, const Logger& log = {});
ExperimentResult run_longterm_experiment(const domain::EvacuationData& data, const ExperimentConfig& cfg,
                                         const Logger& log = {});

// One deployable MLP: trained on the training split of `seed`, selected on its validation split.
models::MlpArtifact train_longterm_model(const LongTermData& d, const ExperimentConfig& cfg, std::uint64_t seed,
                                         models::TrainHistory* history = nullptr);

} // namespace evacast::pipeline
