#pragma once

#include "evacast/features/spi.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace evacast::metrics {

using features::CongestionLabel;
inline constexpr std::size_t kClasses = features::kNumClasses;

// Rows are truth, columns prediction.
struct ConfusionMatrix {
    std::array<std::array<std::size_t, kClasses>, kClasses> counts{};

    std::size_t total() const;
    std::size_t trace() const;
    std::size_t tp(std::size_t c) const { return counts[c][c]; }
    std::size_t fp(std::size_t c) const; // predicted c, truth differs
    std::size_t fn(std::size_t c) const; // truth c, predicted differs
    std::size_t tn(std::size_t c) const { return total() - tp(c) - fp(c) - fn(c); }
};

ConfusionMatrix confusion_matrix(const std::vector<CongestionLabel>& truth, const std::vector<CongestionLabel>& pred);

struct BinaryMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    bool precision_undefined = false; // no predicted positives; precision reported 0
    bool recall_undefined = false;    // no actual positives; recall reported 0
};

BinaryMetrics binary_metrics(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn);

struct ClassificationReport {
    ConfusionMatrix confusion;
    std::array<BinaryMetrics, kClasses> per_class{}; // one-vs-rest; .accuracy unused
    std::array<std::size_t, kClasses> support{};
    double accuracy = 0.0;
    std::size_t n = 0;
};

ClassificationReport classification_report(const std::vector<CongestionLabel>& truth,
                                           const std::vector<CongestionLabel>& pred);
ClassificationReport classification_report(const ConfusionMatrix& cm);

} // namespace evacast::metrics
