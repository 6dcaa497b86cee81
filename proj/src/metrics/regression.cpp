#include "evacast/metrics/regression.hpp"

#include "evacast/core/error.hpp"

#include <cmath>

namespace evacast::metrics {

RegressionReport regression_report(const std::vector<double>& truth, const std::vector<double>& pred,
                                   double mape_floor) {
    if (truth.size() != pred.size())
        throw ValidationError("truth and prediction lengths differ (" + std::to_string(truth.size()) + " vs " +
                              std::to_string(pred.size()) + ")");
    if (truth.empty()) throw ValidationError("regression report needs at least one sample");
    RegressionReport r;
    double se = 0.0, ae = 0.0, pe = 0.0;
    std::size_t n_pe = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = pred[i] - truth[i];
        se += e * e;
        ae += std::abs(e);
        if (truth[i] >= mape_floor) {
            pe += std::abs(e / truth[i]);
            ++n_pe;
        } else {
            ++r.n_excluded;
        }
    }
    const double n = static_cast<double>(truth.size());
    r.n_evaluated = truth.size();
    r.rmse = std::sqrt(se / n);
    r.mae = ae / n;
    if (n_pe > 0) r.mape = 100.0 * pe / static_cast<double>(n_pe);
    return r;
}

std::vector<std::size_t> window_indices(const std::vector<Timestamp>& times, Timestamp t_start, Timestamp t_end) {
    if (t_end <= t_start) throw ValidationError("window end must be after its start");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= t_start && times[i] < t_end) out.push_back(i);
    return out;
}

} // namespace evacast::metrics
