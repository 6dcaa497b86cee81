#include "evacast/pipeline/result.hpp"

#include "evacast/core/error.hpp"
#include "evacast/metrics/report_text.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace evacast::pipeline {

using nlohmann::json;

const ModelResult& ExperimentResult::model(const std::string& name) const {
    for (const auto& m : models)
        if (m.model == name) return m;
    throw ValidationError("no result for model " + name);
}

const ModelResult& ExperimentResult::model(int horizon_h, const std::string& name) const {
    for (const auto& h : horizons)
        if (h.horizon_h == horizon_h)
            for (const auto& m : h.models)
                if (m.model == name) return m;
    throw ValidationError("no result for model " + name + " at horizon " + std::to_string(horizon_h));
}

namespace {

json models_to_json(const std::vector<ModelResult>& ms) {
    json out = json::array();
    for (const auto& m : ms) out.push_back({{"model", m.model}, {"report", metrics::to_json(m.report)}});
    return out;
}

std::vector<ModelResult> models_from_json(const json& j) {
    std::vector<ModelResult> out;
    for (const auto& m : j) out.push_back({m.at("model").get<std::string>(), metrics::aggregated_from_json(m.at("report"))});
    return out;
}

} // namespace

json to_json(const ExperimentResult& r) {
    json hs = json::array();
    for (const auto& h : r.horizons)
        hs.push_back({{"horizon_h", h.horizon_h}, {"n_pool", h.n_pool}, {"models", models_to_json(h.models)}});
    return {{"task", r.task},         {"models", models_to_json(r.models)}, {"horizons", hs},
            {"config", r.config},     {"seeds", r.seeds},                    {"warnings", r.warnings},
            {"details", r.details}};
}

ExperimentResult experiment_result_from_json(const json& j) {
    try {
        ExperimentResult r;
        r.task = j.at("task").get<std::string>();
        r.models = models_from_json(j.at("models"));
        for (const auto& h : j.at("horizons"))
            r.horizons.push_back({h.at("horizon_h").get<int>(), models_from_json(h.at("models")),
                                  h.at("n_pool").get<std::size_t>()});
        r.config = j.at("config");
        r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        r.warnings = j.at("warnings").get<std::vector<std::string>>();
        r.details = j.value("details", json::object());
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("experiment result malformed: ") + e.what());
    }
}

json to_json(const AblationResult& r) {
    return {{"full", to_json(r.full)},
            {"ablated", to_json(r.ablated)},
            {"dropped", r.dropped},
            {"delta_accuracy", r.delta_accuracy}};
}

std::string format_result(const ExperimentResult& r) {
    std::ostringstream os;
    if (r.task == "long") {
        std::vector<std::pair<std::string, metrics::AggregatedReport>> rows;
        for (const auto& m : r.models) rows.emplace_back(m.model, m.report);
        os << metrics::format_classification_table(rows);
        if (!r.models.empty()) {
            os << "\nPer-repeat " << r.models.front().model << ":\n";
            os << metrics::format_repeat_table(r.models.front().report,
                                               {"accuracy", "f1_none", "f1_light", "f1_heavy"});
        }
    } else {
        std::vector<metrics::HorizonRow> rows;
        for (const auto& h : r.horizons)
            for (const auto& m : h.models) rows.push_back({h.horizon_h, m.model, m.report});
        os << metrics::format_regression_table(rows);
    }
    for (const auto& w : r.warnings) os << "warning: " << w << "\n";
    return os.str();
}

std::string format_ablation(const AblationResult& r) {
    const auto& full = r.full.model("MLP").report.at("accuracy");
    const auto& abl = r.ablated.model("MLP").report.at("accuracy");
    std::ostringstream os;
    os << "Features          Accuracy\n";
    os << "All               " << metrics::format_mean_std(full) << "\n";
    os << "Without ";
    for (std::size_t i = 0; i < r.dropped.size(); ++i) os << (i ? ", " : "") << r.dropped[i];
    os << "\n                  " << metrics::format_mean_std(abl) << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", r.delta_accuracy);
    os << "Delta             " << buf << "\n";
    return os.str();
}

void save_json(const json& j, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

} // namespace evacast::pipeline
