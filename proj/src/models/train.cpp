#include "evacast/models/train.hpp"

#include "evacast/core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace evacast::models {

namespace {

std::vector<Matrix> snapshot(const std::vector<const Parameter*>& params) {
    std::vector<Matrix> out;
    out.reserve(params.size());
    for (const auto* p : params) out.push_back(p->value);
    return out;
}

void restore(const ParameterList& params, const std::vector<Matrix>& values) {
    for (std::size_t k = 0; k < params.size(); ++k) params[k]->value = values[k];
}

void ensure_finite(double loss, std::size_t epoch, std::size_t batch) {
    if (!std::isfinite(loss))
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch));
}

Matrix gather_rows(const Matrix& x, std::span<const std::size_t> idx) {
    Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
    return out;
}

double accuracy(const Matrix& p, const std::vector<int>& y) {
    if (y.empty()) return 0.0;
    std::size_t ok = 0;
    for (Eigen::Index r = 0; r < p.rows(); ++r) {
        Eigen::Index arg = 0;
        p.row(r).maxCoeff(&arg);
        if (arg == y[static_cast<std::size_t>(r)]) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(y.size());
}

double mean_ce(const Mlp& model, const Matrix& x, const std::vector<int>& y, double* acc) {
    const Matrix p = model.forward(x);
    double loss = 0.0;
    for (Eigen::Index r = 0; r < p.rows(); ++r) loss -= std::log(std::max(p(r, y[static_cast<std::size_t>(r)]), 1e-300));
    if (acc) *acc = accuracy(p, y);
    return loss / static_cast<double>(p.rows());
}

} // namespace

TrainHistory train_classifier(Mlp& model, const Matrix& x_train, const std::vector<int>& y_train, const Matrix& x_val,
                              const std::vector<int>& y_val, const AdamConfig& cfg, std::uint64_t seed,
                              const EpochCallback& on_epoch) {
    cfg.validate();
    if (x_train.rows() == 0) throw ValidationError("training set is empty");
    if (static_cast<std::size_t>(x_train.rows()) != y_train.size() ||
        static_cast<std::size_t>(x_val.rows()) != y_val.size())
        throw ValidationError("feature and label counts differ");
    const auto params = model.parameters();
    Adam opt(params, cfg);
    Rng rng(derive_seed(seed, 0x747263));
    std::vector<std::size_t> order(static_cast<std::size_t>(x_train.rows()));
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainHistory hist;
    hist.initial_loss = mean_ce(model, x_train, y_train, nullptr);
    ensure_finite(hist.initial_loss, 0, 0);
    const bool has_val = x_val.rows() > 0;
    double best = -1.0;
    std::vector<Matrix> best_values;
    std::vector<int> yb;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        double sum = 0.0;
        for (std::size_t start = 0, b = 0; start < order.size(); start += cfg.batch_size, ++b) {
            const std::size_t n = std::min(cfg.batch_size, order.size() - start);
            const std::span<const std::size_t> idx(order.data() + start, n);
            yb.resize(n);
            for (std::size_t i = 0; i < n; ++i) yb[i] = y_train[idx[i]];
            const double loss = model.loss_and_grad(gather_rows(x_train, idx), yb);
            ensure_finite(loss, e, b);
            opt.step();
            sum += loss * static_cast<double>(n);
        }
        hist.train_loss.push_back(sum / static_cast<double>(order.size()));
        double acc = 0.0;
        hist.val_loss.push_back(has_val ? mean_ce(model, x_val, y_val, &acc) : 0.0);
        hist.val_metric.push_back(acc);
        if (!has_val || acc > best) {
            best = acc;
            hist.best_epoch = e;
            best_values = snapshot(std::as_const(model).parameters());
        }
        if (on_epoch) on_epoch(e, hist);
    }
    restore(params, best_values);
    return hist;
}

void InMemorySequences::add(std::span<const double> seq, double target) {
    if (seq.size() != steps_ * width_) throw ValidationError("sequence has the wrong number of values");
    x_.insert(x_.end(), seq.begin(), seq.end());
    y_.push_back(target);
}

void InMemorySequences::fill(std::span<const std::size_t> idx, SequenceBatch& xs, Vector* y) const {
    const auto B = static_cast<Eigen::Index>(idx.size());
    const auto D = static_cast<Eigen::Index>(width_);
    xs.resize(steps_);
    for (auto& m : xs) m.resize(B, D);
    if (y) y->resize(B);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double* base = x_.data() + idx[i] * steps_ * width_;
        for (std::size_t t = 0; t < steps_; ++t)
            xs[t].row(static_cast<Eigen::Index>(i)) = Eigen::Map<const RowVector>(base + t * width_, D);
        if (y) (*y)(static_cast<Eigen::Index>(i)) = y_[idx[i]];
    }
}

void IndexedSequences::fill(std::span<const std::size_t> idx, SequenceBatch& xs, Vector* y) const {
    std::vector<std::size_t> mapped(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) mapped[i] = idx_.at(idx[i]);
    base_.fill(mapped, xs, y);
}

Vector predict_sequences(const SequenceModel& model, const SequenceSource& src, std::size_t batch) {
    Vector out(static_cast<Eigen::Index>(src.size()));
    SequenceBatch xs;
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < src.size(); start += batch) {
        const std::size_t n = std::min(batch, src.size() - start);
        idx.resize(n);
        std::iota(idx.begin(), idx.end(), start);
        src.fill(idx, xs, nullptr);
        out.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(n)) = model.forward(xs);
    }
    return out;
}

namespace {

double source_mse(const SequenceModel& model, const SequenceSource& src) {
    if (src.size() == 0) return 0.0;
    const Vector p = predict_sequences(model, src);
    Vector y(static_cast<Eigen::Index>(src.size()));
    SequenceBatch xs;
    std::vector<std::size_t> idx;
    Vector yb;
    for (std::size_t start = 0; start < src.size(); start += 512) {
        const std::size_t n = std::min<std::size_t>(512, src.size() - start);
        idx.resize(n);
        std::iota(idx.begin(), idx.end(), start);
        src.fill(idx, xs, &yb);
        y.segment(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(n)) = yb;
    }
    return (p - y).squaredNorm() / static_cast<double>(src.size());
}

} // namespace

TrainHistory train_regressor(SequenceModel& model, const SequenceSource& train, const SequenceSource& val,
                             const AdamConfig& cfg, std::uint64_t seed, const EpochCallback& on_epoch) {
    cfg.validate();
    if (train.size() == 0) throw ValidationError("training set is empty");
    if (train.width() != model.shape().input_dim || (val.size() > 0 && val.width() != model.shape().input_dim))
        throw ValidationError("sequence width does not match the model input");
    const auto params = model.parameters();
    Adam opt(params, cfg);
    Rng shuffle_rng(derive_seed(seed, 0x747263));
    Rng dropout_rng(derive_seed(seed, 0x64726f));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainHistory hist;
    hist.initial_loss = source_mse(model, train);
    ensure_finite(hist.initial_loss, 0, 0);
    const bool has_val = val.size() > 0;
    double best = 0.0;
    std::vector<Matrix> best_values;
    SequenceBatch xs;
    Vector yb;
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double sum = 0.0;
        for (std::size_t start = 0, b = 0; start < order.size(); start += cfg.batch_size, ++b) {
            const std::size_t n = std::min(cfg.batch_size, order.size() - start);
            train.fill(std::span<const std::size_t>(order.data() + start, n), xs, &yb);
            const double loss = model.loss_and_grad(xs, yb, &dropout_rng);
            ensure_finite(loss, e, b);
            opt.step();
            sum += loss * static_cast<double>(n);
        }
        hist.train_loss.push_back(sum / static_cast<double>(order.size()));
        const double vmse = has_val ? source_mse(model, val) : 0.0;
        hist.val_loss.push_back(vmse);
        hist.val_metric.push_back(std::sqrt(vmse));
        if (!has_val || e == 0 || vmse < best) {
            best = vmse;
            hist.best_epoch = e;
            best_values = snapshot(std::as_const(model).parameters());
        }
        if (on_epoch) on_epoch(e, hist);
    }
    restore(params, best_values);
    return hist;
}

} // namespace evacast::models
