#include "evacast/pipeline/ablation.hpp"

namespace evacast::pipeline {

AblationResult run_ablation(const LongTermData& d, const ExperimentConfig& cfg, const std::vector<std::string>& drop,
                            const ExperimentResult* full, const Logger& log) {
    // Validate the drop set before spending time on the full run.
    const LongTermData reduced = drop_features(d, drop);
    AblationResult r;
    for (const auto& name : drop) r.dropped.push_back(*features::canonical_feature_name(name));
    r.full = full ? *full : run_longterm_experiment(d, cfg, log);
    r.ablated = run_longterm_experiment(reduced, cfg, log);
    r.delta_accuracy =
        r.full.model("MLP").report.at("accuracy").mean - r.ablated.model("MLP").report.at("accuracy").mean;
    return r;
}

} // namespace evacast::pipeline
