#include "evacast/metrics/classification.hpp"

#include "evacast/core/error.hpp"

namespace evacast::metrics {

std::size_t ConfusionMatrix::total() const {
    std::size_t s = 0;
    for (const auto& row : counts)
        for (const auto v : row) s += v;
    return s;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t s = 0;
    for (std::size_t c = 0; c < kClasses; ++c) s += counts[c][c];
    return s;
}

std::size_t ConfusionMatrix::fp(std::size_t c) const {
    std::size_t s = 0;
    for (std::size_t t = 0; t < kClasses; ++t)
        if (t != c) s += counts[t][c];
    return s;
}

std::size_t ConfusionMatrix::fn(std::size_t c) const {
    std::size_t s = 0;
    for (std::size_t p = 0; p < kClasses; ++p)
        if (p != c) s += counts[c][p];
    return s;
}

ConfusionMatrix confusion_matrix(const std::vector<CongestionLabel>& truth, const std::vector<CongestionLabel>& pred) {
    if (truth.size() != pred.size())
        throw ValidationError("truth and prediction lengths differ (" + std::to_string(truth.size()) + " vs " +
                              std::to_string(pred.size()) + ")");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i)
        ++cm.counts[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(pred[i])];
    return cm;
}

BinaryMetrics binary_metrics(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    BinaryMetrics m;
    const auto d = [](std::size_t v) { return static_cast<double>(v); };
    if (tp + fp == 0) m.precision_undefined = true;
    else m.precision = d(tp) / d(tp + fp);
    if (tp + fn == 0) m.recall_undefined = true;
    else m.recall = d(tp) / d(tp + fn);
    if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    const std::size_t n = tp + fp + fn + tn;
    if (n > 0) m.accuracy = d(tp + tn) / d(n);
    return m;
}

ClassificationReport classification_report(const ConfusionMatrix& cm) {
    ClassificationReport r;
    r.confusion = cm;
    r.n = cm.total();
    if (r.n == 0) throw ValidationError("classification report needs at least one sample");
    r.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(r.n);
    for (std::size_t c = 0; c < kClasses; ++c) {
        r.per_class[c] = binary_metrics(cm.tp(c), cm.fp(c), cm.fn(c), cm.tn(c));
        r.support[c] = cm.tp(c) + cm.fn(c);
    }
    return r;
}

ClassificationReport classification_report(const std::vector<CongestionLabel>& truth,
                                           const std::vector<CongestionLabel>& pred) {
    return classification_report(confusion_matrix(truth, pred));
}

} // namespace evacast::metrics
