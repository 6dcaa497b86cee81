#pragma once

#include "evacast/metrics/classification.hpp"
#include "evacast/metrics/regression.hpp"
#include "evacast/models/serialize.hpp"
#include "evacast/pipeline/longterm.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>

namespace evacast::pipeline {

// A saved MLP scored on the stratified test split of `seed`. Columns the
// artifact lacks are dropped from the data first, so ablated models work.
metrics::ClassificationReport evaluate_longterm_model(const models::MlpArtifact& mlp, const LongTermData& d,
                                                      std::uint64_t seed);

struct SpeedEvaluation {
    int horizon_h = 1;
    std::size_t n_test = 0;
    metrics::RegressionReport model;
    metrics::RegressionReport persistence; // same windows
};

// A saved sequence model scored (in mph) on the heavy-link test windows of `seed`.
SpeedEvaluation evaluate_shortterm_model(const models::SequenceArtifact& model, const domain::EvacuationData& data,
                                         const ExperimentConfig& cfg, std::uint64_t seed);

nlohmann::json to_json(const SpeedEvaluation& e);
std::string format_evaluation(const metrics::ClassificationReport& r);
std::string format_evaluation(const SpeedEvaluation& e);

} // namespace evacast::pipeline
