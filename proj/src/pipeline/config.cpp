#include "evacast/pipeline/config.hpp"

#include "evacast/core/error.hpp"
#include "evacast/synth/dataset_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace evacast::pipeline {

using nlohmann::json;

namespace {

json adam_to_json(const models::AdamConfig& a) {
    return {{"learning_rate", a.learning_rate}, {"beta1", a.beta1},           {"beta2", a.beta2},
            {"epsilon", a.epsilon},             {"batch_size", a.batch_size}, {"epochs", a.epochs}};
}

models::AdamConfig adam_from_json(const json& j, models::AdamConfig a) {
    a.learning_rate = j.value("learning_rate", a.learning_rate);
    a.beta1 = j.value("beta1", a.beta1);
    a.beta2 = j.value("beta2", a.beta2);
    a.epsilon = j.value("epsilon", a.epsilon);
    a.batch_size = j.value("batch_size", a.batch_size);
    a.epochs = j.value("epochs", a.epochs);
    return a;
}

} // namespace

void ExperimentConfig::validate() const {
    if (data.data_dir.empty()) {
        if (data.n_links < 1) throw ValidationError("n_links must be >= 1");
        if (data.hurricanes.empty()) throw ValidationError("at least one hurricane is required");
        for (const auto& h : data.hurricanes)
            if (!domain::find_preset(h)) throw ValidationError("unknown hurricane preset: " + h);
        synth::validate(data.scenario);
    }
    if (seeds.empty()) throw ValidationError("at least one seed is required");
    std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
    if (uniq.size() != seeds.size()) throw ValidationError("seeds must be distinct");
    mlp_adam.validate();
    seq_adam.validate();
    if (knn_k == 0) throw ValidationError("knn_k must be >= 1");
    if (horizons.empty()) throw ValidationError("at least one horizon is required");
    for (int h : horizons)
        if (h < 1 || h > 6) throw ValidationError("horizons must lie in [1, 6]");
    if (window_len < 1) throw ValidationError("window_len must be >= 1");
    if (lstm_hidden == 0 || lstm_layers == 0 || rnn_hidden == 0 || rnn_layers == 0)
        throw ValidationError("recurrent sizes must be >= 1");
    if (!(lstm_dropout >= 0.0 && lstm_dropout < 1.0)) throw ValidationError("lstm_dropout must lie in [0, 1)");
}

json config_to_json(const ExperimentConfig& c) {
    return {{"data",
             {{"data_dir", c.data.data_dir},
              {"n_links", c.data.n_links},
              {"network_seed", c.data.network_seed},
              {"hurricanes", c.data.hurricanes},
              {"scenario", synth::config_to_json(c.data.scenario)}}},
            {"seeds", c.seeds},
            {"features", {{"utc_offset_hours", c.features.utc_offset_hours},
                          {"zone_meridian_lon", c.features.zone_meridian_lon}}},
            {"mlp_hidden", c.mlp_hidden},
            {"mlp_adam", adam_to_json(c.mlp_adam)},
            {"knn_k", c.knn_k},
            {"horizons", c.horizons},
            {"window_len", c.window_len},
            {"lstm_hidden", c.lstm_hidden},
            {"lstm_layers", c.lstm_layers},
            {"lstm_dropout", c.lstm_dropout},
            {"rnn_hidden", c.rnn_hidden},
            {"rnn_layers", c.rnn_layers},
            {"seq_adam", adam_to_json(c.seq_adam)},
            {"max_train_sequences", c.max_train_sequences},
            {"max_val_sequences", c.max_val_sequences},
            {"heavy_links_only", c.heavy_links_only},
            {"ablation_drop", c.ablation_drop}};
}

ExperimentConfig experiment_config_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("experiment config must be a JSON object");
    ExperimentConfig c;
    try {
        if (j.contains("data")) {
            const auto& d = j.at("data");
            c.data.data_dir = d.value("data_dir", c.data.data_dir);
            c.data.n_links = d.value("n_links", c.data.n_links);
            c.data.network_seed = d.value("network_seed", c.data.network_seed);
            c.data.hurricanes = d.value("hurricanes", c.data.hurricanes);
            if (d.contains("scenario")) c.data.scenario = synth::config_from_json(d.at("scenario"));
        }
        c.seeds = j.value("seeds", c.seeds);
        if (j.contains("features")) {
            c.features.utc_offset_hours = j.at("features").value("utc_offset_hours", c.features.utc_offset_hours);
            c.features.zone_meridian_lon = j.at("features").value("zone_meridian_lon", c.features.zone_meridian_lon);
        }
        c.mlp_hidden = j.value("mlp_hidden", c.mlp_hidden);
        if (j.contains("mlp_adam")) c.mlp_adam = adam_from_json(j.at("mlp_adam"), c.mlp_adam);
        c.knn_k = j.value("knn_k", c.knn_k);
        c.horizons = j.value("horizons", c.horizons);
        c.window_len = j.value("window_len", c.window_len);
        c.lstm_hidden = j.value("lstm_hidden", c.lstm_hidden);
        c.lstm_layers = j.value("lstm_layers", c.lstm_layers);
        c.lstm_dropout = j.value("lstm_dropout", c.lstm_dropout);
        c.rnn_hidden = j.value("rnn_hidden", c.rnn_hidden);
        c.rnn_layers = j.value("rnn_layers", c.rnn_layers);
        if (j.contains("seq_adam")) c.seq_adam = adam_from_json(j.at("seq_adam"), c.seq_adam);
        c.max_train_sequences = j.value("max_train_sequences", c.max_train_sequences);
        c.max_val_sequences = j.value("max_val_sequences", c.max_val_sequences);
        c.heavy_links_only = j.value("heavy_links_only", c.heavy_links_only);
        c.ablation_drop = j.value("ablation_drop", c.ablation_drop);
    } catch (const json::exception& e) {
        throw ParseError(std::string("experiment config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config file not found: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return experiment_config_from_json(json::parse(buf.str()));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

domain::EvacuationData load_or_generate(const DataSource& src) {
    if (!src.data_dir.empty()) return synth::read_dataset(src.data_dir);
    std::vector<domain::HurricaneEvent> hs;
    for (const auto& name : src.hurricanes) {
        const auto h = domain::find_preset(name);
        if (!h) throw ValidationError("unknown hurricane preset: " + name);
        hs.push_back(*h);
    }
    const auto net = synth::generate_network(src.n_links, domain::kLouisianaBox, src.network_seed);
    return synth::generate_dataset(net, hs, src.scenario);
}

} // namespace evacast::pipeline
