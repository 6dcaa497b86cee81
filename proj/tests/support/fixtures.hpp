#pragma once

#include "evacast/domain/evacuation_data.hpp"
#include "evacast/pipeline/config.hpp"
#include "evacast/synth/generator.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace evacast::testing {

inline domain::RoadLink straight_link(const std::string& id, double lat, double lon, domain::Direction d,
                                      int lanes = 3) {
    domain::RoadLink l;
    l.link_id = id;
    l.geometry = {{lat, lon}, {lat + 0.01, lon + 0.01}};
    l.centroid = domain::vertex_centroid(l.geometry);
    l.direction = d;
    l.lanes = lanes;
    return l;
}

inline domain::HurricaneEvent ida() { return *domain::find_preset("ida"); }

// Small generated dataset shared by the pipeline-level tests.
inline const domain::EvacuationData& small_dataset() {
    static const domain::EvacuationData data = [] {
        pipeline::DataSource src;
        src.n_links = 40;
        src.hurricanes = {"ida", "laura"};
        return pipeline::load_or_generate(src);
    }();
    return data;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("evacast_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

} // namespace evacast::testing
