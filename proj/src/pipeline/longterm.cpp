#include "evacast/pipeline/longterm.hpp"

#include "evacast/baselines/knn.hpp"
#include "evacast/core/error.hpp"
#include "evacast/core/rng.hpp"
#include "evacast/dataset/repeats.hpp"
#include "evacast/metrics/classification.hpp"

#include <algorithm>
#include <set>

namespace evacast::pipeline {

using features::CongestionLabel;
using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamMlpInit = 0x6d6c7069;
constexpr std::uint64_t kStreamMlpTrain = 0x6d6c7074;

dataset::RepeatOptions longterm_options(const LongTermData& d) {
    dataset::RepeatOptions opts;
    opts.split = dataset::SplitSpec{0.6, 0.2, 0.2, true, 0};
    opts.balance = true;
    const auto pass = features::passthrough_mask(d.names);
    opts.fit_normalizer = [&d, pass](const std::vector<std::size_t>& idx) {
        return features::fit_normalizer(
            idx.size(), [&](std::size_t i) { return d.samples[idx[i]].features.data(); }, pass);
    };
    return opts;
}

std::vector<CongestionLabel> argmax_labels(const models::Matrix& p) {
    std::vector<CongestionLabel> out;
    out.reserve(static_cast<std::size_t>(p.rows()));
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        Eigen::Index arg = 0;
        p.row(r).maxCoeff(&arg);
        out.push_back(static_cast<CongestionLabel>(arg));
    }
    return out;
}

std::vector<CongestionLabel> select_labels(const LongTermData& d, const std::vector<std::size_t>& idx) {
    std::vector<CongestionLabel> out;
    out.reserve(idx.size());
    for (const auto i : idx) out.push_back(d.labels[i]);
    return out;
}

models::MlpShape mlp_shape(const LongTermData& d, const ExperimentConfig& cfg) {
    return models::MlpShape{d.names.size(), cfg.mlp_hidden, features::kNumClasses};
}

} // namespace

LongTermData prepare_longterm(const domain::EvacuationData& data, const features::FeatureConfig& cfg) {
    auto build = features::build_longterm_samples(data, cfg);
    LongTermData d;
    d.samples = std::move(build.samples);
    d.excluded = build.excluded;
    d.names = features::longterm_feature_names();
    std::set<std::string> hs;
    for (const auto& s : d.samples) {
        d.labels.push_back(s.label);
        hs.insert(s.hurricane);
    }
    d.n_hurricanes = hs.size();
    if (d.samples.empty()) throw ValidationError("no labelled long-term samples could be built");
    return d;
}

LongTermData drop_features(const LongTermData& d, const std::vector<std::string>& drop) {
    std::set<std::string> gone;
    for (const auto& name : drop) {
        const auto canon = features::canonical_feature_name(name);
        if (!canon || std::find(d.names.begin(), d.names.end(), *canon) == d.names.end())
            throw ValidationError("unknown feature name: " + name);
        gone.insert(*canon);
    }
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < d.names.size(); ++c)
        if (!gone.count(d.names[c])) keep.push_back(c);
    if (keep.empty()) throw ValidationError("cannot drop every feature");

    LongTermData out;
    out.labels = d.labels;
    out.excluded = d.excluded;
    out.n_hurricanes = d.n_hurricanes;
    for (const auto c : keep) out.names.push_back(d.names[c]);
    out.samples.reserve(d.samples.size());
    for (const auto& s : d.samples) {
        auto t = s;
        t.features.clear();
        for (const auto c : keep) t.features.push_back(s.features[c]);
        out.samples.push_back(std::move(t));
    }
    return out;
}

models::Matrix feature_matrix(const LongTermData& d, const std::vector<std::size_t>& idx,
                              const features::NormalizationStats& norm) {
    models::Matrix x(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(d.names.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        auto row = x.row(static_cast<Eigen::Index>(i));
        const auto& f = d.samples[idx[i]].features;
        for (std::size_t c = 0; c < f.size(); ++c) row(static_cast<Eigen::Index>(c)) = norm.normalize(c, f[c]);
    }
    return x;
}

std::vector<int> label_codes(const LongTermData& d, const std::vector<std::size_t>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (const auto i : idx) out.push_back(static_cast<int>(d.labels[i]));
    return out;
}

ExperimentResult run_longterm_experiment(const LongTermData& d, const ExperimentConfig& cfg, const Logger& log) {
    cfg.validate();
    const dataset::ExperimentPlan plan(cfg.seeds);
    ExperimentResult result;
    result.task = "long";
    result.config = config_to_json(cfg);
    result.seeds = cfg.seeds;
    if (d.n_hurricanes < 2)
        result.warnings.push_back("only one hurricane in the data; results say nothing about generalization "
                                  "to other storms");

    struct Pair {
        metrics::RepeatReport mlp, knn;
        json detail;
    };
    const std::function<Pair(const dataset::RepeatContext&)> experiment = [&](const dataset::RepeatContext& ctx) {
        const auto& norm = *ctx.normalization;
        const auto xtr = feature_matrix(d, ctx.train, norm);
        const auto ytr = label_codes(d, ctx.train);
        const auto xval = feature_matrix(d, ctx.split.val, norm);
        const auto yval = label_codes(d, ctx.split.val);
        const auto xte = feature_matrix(d, ctx.split.test, norm);
        const auto truth = select_labels(d, ctx.split.test);

        models::Mlp mlp(mlp_shape(d, cfg), derive_seed(ctx.seed, kStreamMlpInit));
        const auto hist =
            models::train_classifier(mlp, xtr, ytr, xval, yval, cfg.mlp_adam, derive_seed(ctx.seed, kStreamMlpTrain));
        const auto mlp_rep = metrics::classification_report(truth, argmax_labels(mlp.forward(xte)));

        const baselines::KnnIndex knn(xtr, select_labels(d, ctx.train), cfg.knn_k);
        const auto knn_rep = metrics::classification_report(truth, knn.classify_all(xte));
        if (log)
            log("long-term repeat " + std::to_string(ctx.repeat + 1) + ": MLP accuracy " +
                std::to_string(mlp_rep.accuracy) + ", KNN accuracy " + std::to_string(knn_rep.accuracy));
        json detail{{"seed", ctx.seed},
                    {"n_train_balanced", ctx.train.size()},
                    {"n_train", ctx.split.train.size()},
                    {"n_val", ctx.split.val.size()},
                    {"n_test", ctx.split.test.size()},
                    {"best_epoch", hist.best_epoch},
                    {"mlp", metrics::to_json(mlp_rep)},
                    {"knn", metrics::to_json(knn_rep)}};
        return Pair{metrics::flatten(mlp_rep), metrics::flatten(knn_rep), std::move(detail)};
    };
    const auto pairs = dataset::run_repeats<Pair>(d.samples.size(), d.labels, plan, longterm_options(d), experiment);

    std::vector<metrics::RepeatReport> mlp_reps, knn_reps;
    json details = json::array();
    for (const auto& p : pairs) {
        mlp_reps.push_back(p.mlp);
        knn_reps.push_back(p.knn);
        details.push_back(p.detail);
    }
    if (pairs.size() >= 2) {
        result.models.push_back({"MLP", metrics::aggregate_repeats(mlp_reps)});
        result.models.push_back({"KNN", metrics::aggregate_repeats(knn_reps)});
    } else {
        // A single repeat still reports, with zero spread.
        mlp_reps.push_back(mlp_reps.front());
        knn_reps.push_back(knn_reps.front());
        auto m = metrics::aggregate_repeats(mlp_reps);
        auto k = metrics::aggregate_repeats(knn_reps);
        m.repeats.pop_back();
        k.repeats.pop_back();
        result.models.push_back({"MLP", m});
        result.models.push_back({"KNN", k});
    }
    const auto counts = dataset::class_counts(d.labels, [&] {
        std::vector<std::size_t> all(d.labels.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        return all;
    }());
    result.details = {{"n_samples", d.samples.size()},
                      {"class_counts", counts},
                      {"features", d.names},
                      {"excluded",
                       {{"no_series", d.excluded.no_series},
                        {"degenerate_baseline", d.excluded.degenerate_baseline},
                        {"missing_data", d.excluded.missing_data}}},
                      {"repeats", details}};
    return result;
}

ExperimentResult run_longterm_experiment(const domain::EvacuationData& data, const ExperimentConfig& cfg,
                                         const Logger& log) {
    return run_longterm_experiment(prepare_longterm(data, cfg.features), cfg, log);
}

models::MlpArtifact train_longterm_model(const LongTermData& d, const ExperimentConfig& cfg, std::uint64_t seed,
                                         models::TrainHistory* history) {
    cfg.validate();
    const auto ctx = dataset::prepare_repeat(0, seed, d.samples.size(), d.labels, longterm_options(d));
    models::MlpArtifact a;
    a.normalization = *ctx.normalization;
    a.feature_names = d.names;
    a.model = models::Mlp(mlp_shape(d, cfg), derive_seed(seed, kStreamMlpInit));
    const auto hist = models::train_classifier(a.model, feature_matrix(d, ctx.train, a.normalization),
                                               label_codes(d, ctx.train), feature_matrix(d, ctx.split.val, a.normalization),
                                               label_codes(d, ctx.split.val), cfg.mlp_adam,
                                               derive_seed(seed, kStreamMlpTrain));
    a.metadata = {{"seed", seed}, {"best_epoch", hist.best_epoch}, {"n_train_balanced", ctx.train.size()}};
    if (history) *history = hist;
    return a;
}

} // namespace evacast::pipeline
