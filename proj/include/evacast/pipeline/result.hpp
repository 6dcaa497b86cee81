#pragma once

#include "evacast/metrics/aggregate.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace evacast::pipeline {

struct ModelResult {
    std::string model; // "MLP", "KNN", "LSTM", "RNN", "Persistence"
    metrics::AggregatedReport report;
};

struct HorizonResult {
    int horizon_h = 1;
    std::vector<ModelResult> models;
    std::size_t n_pool = 0; // windows available before splitting
};

struct ExperimentResult {
    std::string task; // "long" | "short"
    std::vector<ModelResult> models;    // long-term
    std::vector<HorizonResult> horizons; // short-term
    nlohmann::json config;               // ExperimentConfig snapshot
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> warnings;
    nlohmann::json details = nlohmann::json::object(); // sample counts and exclusions

    const ModelResult& model(const std::string& name) const;
    const ModelResult& model(int horizon_h, const std::string& name) const;
};

struct AblationResult {
    ExperimentResult full;
    ExperimentResult ablated;
    std::vector<std::string> dropped; // canonical names
    double delta_accuracy = 0.0;      // full minus ablated, mean MLP accuracy
};

nlohmann::json to_json(const ExperimentResult& r);
ExperimentResult experiment_result_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AblationResult& r);

// Plain-text result tables: per-class rows for classification, per-horizon rows for regression.
std::string format_result(const ExperimentResult& r);
std::string format_ablation(const AblationResult& r);

void save_json(const nlohmann::json& j, const std::filesystem::path& path);

} // namespace evacast::pipeline
