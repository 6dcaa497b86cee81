#include "evacast/synth/dataset_io.hpp"

#include "evacast/core/error.hpp"

#include <fstream>
#include <sstream>

namespace evacast::synth {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string file_stem(const std::string& name) {
    std::string s;
    for (const char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
        s += ok ? c : '_';
    }
    return s;
}

} // namespace

json write_dataset(const domain::EvacuationData& ds, const ScenarioConfig& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    json manifest{{"format_version", kManifestVersion},
                  {"seed", cfg.rng_seed},
                  {"n_links", ds.network.size()},
                  {"network", "network.geojson"},
                  {"generator", config_to_json(cfg)},
                  {"hurricanes", json::array()}};
    domain::save_network(ds.network, dir / "network.geojson");
    for (const auto& ev : ds.events) {
        const std::string stem = file_stem(ev.event.name);
        const std::string hfile = "hurricane_" + stem + ".json";
        const std::string sfile = "speeds_" + stem + ".csv";
        domain::save_hurricane(ev.event, dir / hfile);
        domain::save_speeds_csv(ev.speeds, dir / sfile);
        manifest["hurricanes"].push_back({{"name", ev.event.name}, {"hurricane", hfile}, {"speeds", sfile}});
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
    out << manifest.dump(2) << "\n";
    return manifest;
}

domain::EvacuationData read_dataset(const fs::path& dir) {
    const fs::path mpath = dir / "manifest.json";
    std::ifstream in(mpath);
    if (!in) throw ValidationError("dataset manifest not found: " + mpath.string());
    std::stringstream buf;
    buf << in.rdbuf();
    json m;
    try {
        m = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ParseError(mpath.string() + ": " + e.what());
    }
    const int version = m.value("format_version", 0);
    if (version > kManifestVersion)
        throw IncompatibleVersionError("manifest format_version " + std::to_string(version) +
                                       " is newer than supported " + std::to_string(kManifestVersion));
    try {
        domain::EvacuationData ds{domain::load_network(dir / m.at("network").get<std::string>()), {}};
        for (const auto& e : m.at("hurricanes")) {
            auto h = domain::load_hurricane(dir / e.at("hurricane").get<std::string>());
            auto sp = domain::load_speeds_csv(dir / e.at("speeds").get<std::string>());
            ds.events.push_back({std::move(h), std::move(sp)});
        }
        if (ds.events.empty()) throw ValidationError(mpath.string() + ": no hurricanes listed");
        return ds;
    } catch (const json::exception& e) {
        throw ParseError(mpath.string() + ": " + e.what());
    }
}

} // namespace evacast::synth
