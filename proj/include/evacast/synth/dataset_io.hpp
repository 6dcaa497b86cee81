#pragma once

#include "evacast/domain/evacuation_data.hpp"
#include "evacast/synth/generator.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace evacast::synth {

inline constexpr int kManifestVersion = 1;

// Writes network.geojson, hurricane_<name>.json, speeds_<name>.csv and
// manifest.json into dir (created if needed). Returns the manifest.
nlohmann::json write_dataset(const domain::EvacuationData& ds, const ScenarioConfig& cfg,
                             const std::filesystem::path& dir);

// Reads a directory written by write_dataset, or any directory with a
// manifest in the same layout.
domain::EvacuationData read_dataset(const std::filesystem::path& dir);

} // namespace evacast::synth
