#pragma once

#include "evacast/features/normalize.hpp"
#include "evacast/models/mlp.hpp"
#include "evacast/models/recurrent.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace evacast::models {

inline constexpr int kModelFormatVersion = 1;

struct MlpArtifact {
    Mlp model;
    features::NormalizationStats normalization;
    std::vector<std::string> feature_names;
    nlohmann::json metadata = nlohmann::json::object();
};

struct SequenceArtifact {
    SequenceModel model;
    features::NormalizationStats normalization; // per step column
    std::vector<std::string> feature_names;
    int horizon_h = 1;
    std::size_t window_len = 24;
    nlohmann::json metadata = nlohmann::json::object();
};

// Envelope {format_version, model_type, hyperparams, feature_schema,
// normalization, parameters, metadata}. Doubles are written in shortest
// round-trip form, so load(save(m)) is bit-exact.
nlohmann::json to_json(const MlpArtifact& a);
nlohmann::json to_json(const SequenceArtifact& a);
MlpArtifact mlp_from_json(const nlohmann::json& j);
SequenceArtifact sequence_from_json(const nlohmann::json& j);

// "mlp", "lstm" or "rnn"; validates the envelope version.
std::string model_type_of(const nlohmann::json& j);

void save_model(const MlpArtifact& a, const std::filesystem::path& path);
void save_model(const SequenceArtifact& a, const std::filesystem::path& path);
nlohmann::json read_model_json(const std::filesystem::path& path);
MlpArtifact load_mlp(const std::filesystem::path& path);
SequenceArtifact load_sequence_model(const std::filesystem::path& path);

} // namespace evacast::models
