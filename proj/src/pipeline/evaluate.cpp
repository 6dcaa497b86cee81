#include "evacast/pipeline/evaluate.hpp"

#include "evacast/baselines/persistence.hpp"
#include "evacast/core/error.hpp"
#include "evacast/dataset/split.hpp"
#include "evacast/metrics/aggregate.hpp"
#include "evacast/pipeline/shortterm.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace evacast::pipeline {

using nlohmann::json;

metrics::ClassificationReport evaluate_longterm_model(const models::MlpArtifact& mlp, const LongTermData& d,
                                                      std::uint64_t seed) {
    std::vector<std::string> drop;
    for (const auto& n : d.names)
        if (std::find(mlp.feature_names.begin(), mlp.feature_names.end(), n) == mlp.feature_names.end())
            drop.push_back(n);
    const LongTermData view = drop.empty() ? d : drop_features(d, drop);
    if (view.names != mlp.feature_names)
        throw ValidationError("model features do not match the long-term schema");

    const auto parts = dataset::split(view.samples.size(), view.labels, dataset::SplitSpec{0.6, 0.2, 0.2, true, seed});
    const auto probs = mlp.model.forward(feature_matrix(view, parts.test, mlp.normalization));
    std::vector<features::CongestionLabel> truth, pred;
    for (std::size_t i = 0; i < parts.test.size(); ++i) {
        Eigen::Index arg = 0;
        probs.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
        pred.push_back(static_cast<features::CongestionLabel>(arg));
        truth.push_back(view.labels[parts.test[i]]);
    }
    return metrics::classification_report(truth, pred);
}

SpeedEvaluation evaluate_shortterm_model(const models::SequenceArtifact& model, const domain::EvacuationData& data,
                                         const ExperimentConfig& cfg, std::uint64_t seed) {
    if (model.feature_names != features::shortterm_step_names())
        throw ValidationError("model feature schema does not match the short-term schema");
    const auto set = features::build_shortterm_set(data, model.horizon_h, model.window_len, cfg.features);
    const auto sp = split_shortterm(set, cfg, seed);
    if (sp.test.empty())
        throw ValidationError("no heavy-link windows in the test split");
    const WindowSource test(set, sp.test, model.normalization);
    const auto z = models::predict_sequences(model.model, test);

    std::vector<double> truth, pred, persistence;
    for (std::size_t i = 0; i < sp.test.size(); ++i) {
        truth.push_back(set.targets[sp.test[i]]);
        pred.push_back(model.normalization.denormalize(features::kSpeedColumn, z(static_cast<Eigen::Index>(i))));
        persistence.push_back(baselines::persistence_forecast(set, sp.test[i]));
    }
    return SpeedEvaluation{model.horizon_h, sp.test.size(), metrics::regression_report(truth, pred),
                           metrics::regression_report(truth, persistence)};
}

json to_json(const SpeedEvaluation& e) {
    return {{"horizon_h", e.horizon_h},
            {"n_test", e.n_test},
            {"model", metrics::to_json(e.model)},
            {"persistence", metrics::to_json(e.persistence)}};
}

std::string format_evaluation(const metrics::ClassificationReport& r) {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-18s%-12s%-12s%-12s%s\n", "Label", "Precision", "Recall", "F1 score", "Support");
    os << buf;
    for (const auto c : features::kLabels) {
        const auto& m = r.per_class[static_cast<std::size_t>(c)];
        std::snprintf(buf, sizeof buf, "%-18s%-12.3f%-12.3f%-12.3f%zu\n", features::to_string(c).c_str(), m.precision,
                      m.recall, m.f1, r.support[static_cast<std::size_t>(c)]);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, "Accuracy %.3f over %zu samples\n", r.accuracy, r.n);
    os << buf;
    return os.str();
}

std::string format_evaluation(const SpeedEvaluation& e) {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-10s%-14s%-12s%-12s%s\n", "Horizon", "Model", "RMSE (mi/h)", "MAE (mi/h)",
                  "MAPE (%)");
    os << buf;
    for (const auto& [name, rep] : {std::pair{"Model", &e.model}, std::pair{"Persistence", &e.persistence}}) {
        std::snprintf(buf, sizeof buf, "%-10d%-14s%-12.3f%-12.3f%.3f\n", e.horizon_h, name, rep->rmse, rep->mae,
                      rep->mape.value_or(0.0));
        os << buf;
    }
    os << "test windows: " << e.n_test << "\n";
    return os.str();
}

} // namespace evacast::pipeline
