#include "evacast/pipeline/shortterm.hpp"

#include "evacast/baselines/persistence.hpp"
#include "evacast/core/error.hpp"
#include "evacast/core/rng.hpp"
#include "evacast/dataset/repeats.hpp"
#include "evacast/metrics/regression.hpp"

namespace evacast::pipeline {

using nlohmann::json;

namespace {

constexpr std::uint64_t kStreamInit = 0x73716969;
constexpr std::uint64_t kStreamTrain = 0x73717474;
constexpr std::uint64_t kStreamBalance = 0x7371626c;

std::vector<double> to_mph(const models::Vector& z, const features::NormalizationStats& norm) {
    std::vector<double> out(static_cast<std::size_t>(z.size()));
    for (Eigen::Index i = 0; i < z.size(); ++i)
        out[static_cast<std::size_t>(i)] = norm.denormalize(features::kSpeedColumn, z(i));
    return out;
}

std::uint64_t model_stream(models::CellType cell, int horizon) {
    return (cell == models::CellType::Lstm ? 0x100u : 0x200u) + static_cast<std::uint64_t>(horizon);
}

} // namespace

WindowSource::WindowSource(const features::ShortTermSet& set, std::vector<std::size_t> windows,
                           const features::NormalizationStats& norm)
    : set_(set), windows_(std::move(windows)), norm_(norm) {
    if (norm.dim() != features::kShortTermWidth) throw ValidationError("step normalizer has the wrong width");
}

void WindowSource::fill(std::span<const std::size_t> idx, models::SequenceBatch& xs, models::Vector* y) const {
    const auto B = static_cast<Eigen::Index>(idx.size());
    const auto D = static_cast<Eigen::Index>(features::kShortTermWidth);
    xs.resize(set_.window_len);
    for (auto& m : xs) m.resize(B, D);
    if (y) y->resize(B);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const std::size_t w = windows_[idx[i]];
        for (std::size_t t = 0; t < set_.window_len; ++t) {
            const double* row = set_.step_row(w, t);
            auto out = xs[t].row(static_cast<Eigen::Index>(i));
            for (Eigen::Index c = 0; c < D; ++c) out(c) = norm_.normalize(static_cast<std::size_t>(c), row[c]);
        }
        if (y) (*y)(static_cast<Eigen::Index>(i)) = norm_.normalize(features::kSpeedColumn, set_.targets[w]);
    }
}

features::NormalizationStats fit_step_normalizer(const features::ShortTermSet& set,
                                                 const std::vector<std::size_t>& windows) {
    const std::size_t L = set.window_len;
    return features::fit_normalizer(
        windows.size() * L, [&](std::size_t r) { return set.step_row(windows[r / L], r % L); },
        features::passthrough_mask(features::shortterm_step_names()));
}

std::vector<std::size_t> heavy_windows(const features::ShortTermSet& set) {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < set.size(); ++w)
        if (set.tables[set.windows[w].table].has_heavy) out.push_back(w);
    return out;
}

ShortTermSplit split_shortterm(const features::ShortTermSet& set, const ExperimentConfig& cfg, std::uint64_t seed) {
    std::vector<std::size_t> pool;
    if (cfg.heavy_links_only) {
        pool = heavy_windows(set);
    } else {
        pool.resize(set.size());
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    }
    if (pool.size() < 10)
        throw ValidationError("too few short-term windows to split (" + std::to_string(pool.size()) + ")");
    std::vector<features::CongestionLabel> states;
    states.reserve(pool.size());
    for (const auto w : pool) states.push_back(set.states[w]);

    const auto parts = dataset::random_split(pool.size(), dataset::SplitSpec{0.6, 0.2, 0.2, false, seed});
    auto train = dataset::oversample_minority(states, parts.train, derive_seed(seed, kStreamBalance));
    if (cfg.max_train_sequences > 0)
        train = dataset::stratified_subsample(states, train, cfg.max_train_sequences, derive_seed(seed, kStreamBalance, 1));
    auto val = parts.val;
    if (cfg.max_val_sequences > 0)
        val = dataset::stratified_subsample(states, val, cfg.max_val_sequences, derive_seed(seed, kStreamBalance, 2));

    ShortTermSplit out;
    for (const auto i : train) out.train.push_back(pool[i]);
    for (const auto i : val) out.val.push_back(pool[i]);
    for (const auto i : parts.test)
        if (set.tables[set.windows[pool[i]].table].has_heavy) out.test.push_back(pool[i]);
    return out;
}

models::SequenceShape sequence_shape(const ExperimentConfig& cfg, models::CellType cell) {
    models::SequenceShape s;
    s.cell = cell;
    s.input_dim = features::kShortTermWidth;
    s.hidden = cell == models::CellType::Lstm ? cfg.lstm_hidden : cfg.rnn_hidden;
    s.layers = cell == models::CellType::Lstm ? cfg.lstm_layers : cfg.rnn_layers;
    s.dropout = cfg.lstm_dropout;
    return s;
}

ExperimentResult run_shortterm_experiment(const domain::EvacuationData& data, const ExperimentConfig& cfg,
                                          const Logger& log) {
    cfg.validate();
    const dataset::ExperimentPlan plan(cfg.seeds);
    ExperimentResult result;
    result.task = "short";
    result.config = config_to_json(cfg);
    result.seeds = cfg.seeds;
    json details = json::array();

    for (const int h : cfg.horizons) {
        const auto set = features::build_shortterm_set(data, h, cfg.window_len, cfg.features);
        HorizonResult hr;
        hr.horizon_h = h;
        hr.n_pool = cfg.heavy_links_only ? heavy_windows(set).size() : set.size();
        std::vector<metrics::RepeatReport> lstm_reps, rnn_reps, pers_reps;
        for (std::size_t r = 0; r < plan.n_repeats(); ++r) {
            const std::uint64_t seed = plan.seeds()[r];
            try {
                const auto sp = split_shortterm(set, cfg, seed);
                if (sp.test.empty()) throw ValidationError("no heavy-link windows in the test split");
                const auto norm = fit_step_normalizer(set, sp.train);
                const WindowSource train(set, sp.train, norm), val(set, sp.val, norm), test(set, sp.test, norm);
                std::vector<double> truth;
                std::vector<double> persistence;
                for (const auto w : sp.test) {
                    truth.push_back(set.targets[w]);
                    persistence.push_back(baselines::persistence_forecast(set, w));
                }
                json rep_detail{{"horizon_h", h}, {"seed", seed}, {"n_train", sp.train.size()},
                                {"n_val", sp.val.size()}, {"n_test", sp.test.size()}};
                for (const auto cell : {models::CellType::Lstm, models::CellType::Rnn}) {
                    models::SequenceModel m(sequence_shape(cfg, cell), derive_seed(seed, kStreamInit, model_stream(cell, h)));
                    const auto hist = models::train_regressor(m, train, val, cfg.seq_adam,
                                                              derive_seed(seed, kStreamTrain, model_stream(cell, h)));
                    const auto rep = metrics::regression_report(truth, to_mph(models::predict_sequences(m, test), norm));
                    (cell == models::CellType::Lstm ? lstm_reps : rnn_reps).push_back(metrics::flatten(rep));
                    rep_detail[models::to_string(cell)] = {{"best_epoch", hist.best_epoch},
                                                           {"report", metrics::to_json(rep)}};
                    if (log)
                        log("short-term h=" + std::to_string(h) + " repeat " + std::to_string(r + 1) + ": " +
                            models::to_string(cell) + " MAPE " + std::to_string(rep.mape.value_or(-1.0)));
                }
                const auto prep = metrics::regression_report(truth, persistence);
                pers_reps.push_back(metrics::flatten(prep));
                rep_detail["persistence"] = {{"report", metrics::to_json(prep)}};
                details.push_back(std::move(rep_detail));
            } catch (...) {
                dataset::rethrow_with_repeat(r, seed);
            }
        }
        auto agg = [](std::vector<metrics::RepeatReport> reps) {
            if (reps.size() >= 2) return metrics::aggregate_repeats(reps);
            reps.push_back(reps.front());
            auto a = metrics::aggregate_repeats(reps);
            a.repeats.pop_back();
            return a;
        };
        hr.models.push_back({"LSTM", agg(lstm_reps)});
        hr.models.push_back({"RNN", agg(rnn_reps)});
        hr.models.push_back({"Persistence", agg(pers_reps)});
        result.horizons.push_back(std::move(hr));
    }
    result.details = {{"repeats", details}};
    return result;
}

models::SequenceArtifact train_shortterm_model(const domain::EvacuationData& data, const ExperimentConfig& cfg,
                                               int horizon_h, models::CellType cell, std::uint64_t seed,
                                               models::TrainHistory* history) {
    cfg.validate();
    const auto set = features::build_shortterm_set(data, horizon_h, cfg.window_len, cfg.features);
    const auto sp = split_shortterm(set, cfg, seed);
    models::SequenceArtifact a;
    a.normalization = fit_step_normalizer(set, sp.train);
    a.feature_names = features::shortterm_step_names();
    a.horizon_h = horizon_h;
    a.window_len = cfg.window_len;
    a.model = models::SequenceModel(sequence_shape(cfg, cell), derive_seed(seed, kStreamInit, model_stream(cell, horizon_h)));
    const WindowSource train(set, sp.train, a.normalization), val(set, sp.val, a.normalization);
    const auto hist = models::train_regressor(a.model, train, val, cfg.seq_adam,
                                              derive_seed(seed, kStreamTrain, model_stream(cell, horizon_h)));
    a.metadata = {{"seed", seed}, {"best_epoch", hist.best_epoch}, {"n_train", sp.train.size()}};
    if (history) *history = hist;
    return a;
}

} // namespace evacast::pipeline
