#pragma once

#include "evacast/models/adam.hpp"
#include "evacast/models/mlp.hpp"
#include "evacast/models/recurrent.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace evacast::models {

struct TrainHistory {
    std::vector<double> train_loss;  // per epoch, mean over batches
    std::vector<double> val_loss;
    std::vector<double> val_metric;  // accuracy (classifier) or RMSE (regressor)
    std::size_t best_epoch = 0;      // index into the vectors above
    double initial_loss = 0.0;       // training loss before the first update
    std::size_t epochs_run() const { return train_loss.size(); }
};

// Called after every epoch with (epoch, history so far).
using EpochCallback = std::function<void(std::size_t, const TrainHistory&)>;

// Mini-batch Adam on cross-entropy; keeps the weights of the epoch with the
// best validation accuracy (earliest on ties). With no validation rows the
// last epoch is kept.
TrainHistory train_classifier(Mlp& model, const Matrix& x_train, const std::vector<int>& y_train,
                              const Matrix& x_val, const std::vector<int>& y_val, const AdamConfig& cfg,
                              std::uint64_t seed, const EpochCallback& on_epoch = {});

// Random-access source of (sequence, target) pairs, already normalized.
class SequenceSource {
public:
    virtual ~SequenceSource() = default;
    virtual std::size_t size() const = 0;
    virtual std::size_t steps() const = 0;
    virtual std::size_t width() const = 0;
    // xs receives steps() matrices of idx.size() x width(); y (if given) the targets.
    virtual void fill(std::span<const std::size_t> idx, SequenceBatch& xs, Vector* y) const = 0;
};

class InMemorySequences : public SequenceSource {
public:
    InMemorySequences(std::size_t steps, std::size_t width) : steps_(steps), width_(width) {}

    // seq holds steps * width values, step-major.
    void add(std::span<const double> seq, double target);

    std::size_t size() const override { return y_.size(); }
    std::size_t steps() const override { return steps_; }
    std::size_t width() const override { return width_; }
    void fill(std::span<const std::size_t> idx, SequenceBatch& xs, Vector* y) const override;

private:
    std::size_t steps_;
    std::size_t width_;
    std::vector<double> x_;
    std::vector<double> y_;
};

// A view selecting (possibly repeated) indices of another source.
class IndexedSequences : public SequenceSource {
public:
    IndexedSequences(const SequenceSource& base, std::vector<std::size_t> idx)
        : base_(base), idx_(std::move(idx)) {}

    std::size_t size() const override { return idx_.size(); }
    std::size_t steps() const override { return base_.steps(); }
    std::size_t width() const override { return base_.width(); }
    void fill(std::span<const std::size_t> idx, SequenceBatch& xs, Vector* y) const override;

private:
    const SequenceSource& base_;
    std::vector<std::size_t> idx_;
};

// Mini-batch Adam on MSE; keeps the weights of the epoch with the lowest
// validation RMSE. Dropout is active during training only.
TrainHistory train_regressor(SequenceModel& model, const SequenceSource& train, const SequenceSource& val,
                             const AdamConfig& cfg, std::uint64_t seed, const EpochCallback& on_epoch = {});

// Deterministic predictions (dropout off) for every item of the source.
Vector predict_sequences(const SequenceModel& model, const SequenceSource& src, std::size_t batch = 512);

} // namespace evacast::models
