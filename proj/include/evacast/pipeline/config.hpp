#pragma once

#include "evacast/domain/evacuation_data.hpp"
#include "evacast/features/schema.hpp"
#include "evacast/models/adam.hpp"
#include "evacast/synth/generator.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace evacast::pipeline {

// Where experiment data comes from: a dataset directory, or the generator.
struct DataSource {
    std::string data_dir;                 // used when non-empty
    int n_links = 200;
    std::uint64_t network_seed = 1;
    std::vector<std::string> hurricanes{"ida", "delta", "laura", "zeta", "barry"}; // preset names
    synth::ScenarioConfig scenario;       // scenario.rng_seed drives the speeds
};

// Default source reading from dir (empty = generated fixture).
inline DataSource data_source_at(std::string dir) {
    DataSource s;
    s.data_dir = std::move(dir);
    return s;
}

struct ExperimentConfig {
    DataSource data;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    features::FeatureConfig features;

    // long-term
    std::vector<std::size_t> mlp_hidden{64, 64, 64};
    models::AdamConfig mlp_adam{0.001, 0.9, 0.999, 1e-8, 32, 150};
    std::size_t knn_k = 5;

    // short-term
    std::vector<int> horizons{1, 3, 6};
    std::size_t window_len = features::kDefaultWindowLen;
    std::size_t lstm_hidden = 64;
    std::size_t lstm_layers = 2;
    double lstm_dropout = 0.5;
    std::size_t rnn_hidden = 64;
    std::size_t rnn_layers = 1;
    models::AdamConfig seq_adam{0.001, 0.9, 0.999, 1e-8, 64, 150};
    std::size_t max_train_sequences = 0; // 0 = no cap (after balancing)
    std::size_t max_val_sequences = 0;
    bool heavy_links_only = true;        // sample pool for short-term training

    // ablation
    std::vector<std::string> ablation_drop{"distance_to_landfall", "time_to_landfall"};

    void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Loads data_dir, or generates the network and speeds from the snapshot.
domain::EvacuationData load_or_generate(const DataSource& src);

} // namespace evacast::pipeline
