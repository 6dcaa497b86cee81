#include "evacast/models/mc_dropout.hpp"

#include "evacast/core/error.hpp"

#include <cmath>

namespace evacast::models {

McPrediction mc_dropout_predict(const SequenceModel& model, const SequenceBatch& seq, std::size_t passes,
                                std::uint64_t seed, double scale, double shift) {
    if (passes < 2) throw ValidationError("MC dropout needs at least 2 passes");
    if (seq.empty() || seq[0].rows() != 1) throw ValidationError("MC dropout expects a single sequence");
    McPrediction p;
    if (model.shape().dropout == 0.0) {
        // every pass would be the deterministic forward pass
        p.mean = model.forward(seq)(0) * scale + shift;
        p.ci95_low = p.ci95_high = p.mean;
        return p;
    }
    SequenceBatch rep(seq.size());
    for (std::size_t t = 0; t < seq.size(); ++t) rep[t] = seq[t].replicate(static_cast<Eigen::Index>(passes), 1);
    Rng rng(seed);
    const Vector y = (model.forward(rep, true, &rng).array() * scale + shift).matrix();
    p.mean = y.mean();
    p.std = std::sqrt((y.array() - p.mean).square().mean());
    p.ci95_low = p.mean - kZ95 * p.std;
    p.ci95_high = p.mean + kZ95 * p.std;
    return p;
}

std::vector<McPrediction> mc_dropout_predict(const SequenceModel& model, const SequenceSource& src,
                                             std::size_t passes, std::uint64_t seed, double scale, double shift) {
    std::vector<McPrediction> out;
    out.reserve(src.size());
    SequenceBatch xs;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const std::size_t idx[1] = {i};
        src.fill(idx, xs, nullptr);
        out.push_back(mc_dropout_predict(model, xs, passes, derive_seed(seed, i), scale, shift));
    }
    return out;
}

} // namespace evacast::models
