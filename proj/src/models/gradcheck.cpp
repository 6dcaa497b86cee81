#include "evacast/models/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace evacast::models {

GradCheckResult gradient_check(const ParameterList& params, const std::function<double()>& loss,
                               const std::function<void()>& backprop, std::size_t n_params, double epsilon,
                               std::uint64_t seed, Stencil stencil, const KinkProbe& probe) {
    backprop();
    std::vector<std::pair<std::size_t, Eigen::Index>> slots;
    for (std::size_t k = 0; k < params.size(); ++k)
        for (Eigen::Index i = 0; i < params[k]->size(); ++i) slots.emplace_back(k, i);
    if (slots.size() > n_params) {
        Rng rng(derive_seed(seed, 0x677263));
        std::shuffle(slots.begin(), slots.end(), rng);
    }
    const auto base_pattern = probe ? probe() : std::vector<std::uint8_t>{};
    const int max_shrinks = probe ? 2 : 0;

    GradCheckResult r;
    for (const auto& [k, i] : slots) {
        if (r.n_checked >= n_params) break;
        const double a = params[k]->grad.data()[i];
        double& v = params[k]->value.data()[i];
        const double saved = v;
        const auto at = [&](double d) {
            v = saved + d;
            const double l = loss();
            v = saved;
            return l;
        };
        const auto smooth_at = [&](double d) {
            v = saved + d;
            const bool same = probe() == base_pattern;
            v = saved;
            return same;
        };
        std::optional<double> numeric;
        double h = epsilon;
        for (int attempt = 0; attempt <= max_shrinks && !numeric; ++attempt, h /= 10.0) {
            const double reach = stencil == Stencil::Central ? h : 2.0 * h;
            if (probe && !(smooth_at(reach) && smooth_at(-reach) && smooth_at(h) && smooth_at(-h))) continue;
            numeric = stencil == Stencil::Central
                          ? (at(h) - at(-h)) / (2.0 * h)
                          : (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
        }
        if (!numeric) {
            ++r.n_skipped;
            continue;
        }
        const double rel = std::abs(a - *numeric) / std::max(std::abs(a) + std::abs(*numeric), 1e-12);
        r.max_rel_error = std::max(r.max_rel_error, rel);
        ++r.n_checked;
    }
    return r;
}

GradCheckResult gradient_check(Mlp& model, const Matrix& x, const std::vector<int>& y, std::size_t n_params,
                               double epsilon, std::uint64_t seed) {
    return gradient_check(
        model.parameters(), [&] { return model.loss(x, y); }, [&] { model.loss_and_grad(x, y); }, n_params, epsilon,
        seed, Stencil::Central, [&] { return model.relu_pattern(x); });
}

GradCheckResult gradient_check(SequenceModel& model, const SequenceBatch& xs, const Vector& y, bool dropout_active,
                               std::uint64_t dropout_seed, std::size_t n_params, double epsilon, std::uint64_t seed) {
    auto loss = [&] {
        Rng rng(dropout_seed);
        return model.loss(xs, y, dropout_active, &rng);
    };
    auto backprop = [&] {
        Rng rng(dropout_seed);
        model.loss_and_grad(xs, y, dropout_active ? &rng : nullptr);
    };
    return gradient_check(model.parameters(), loss, backprop, n_params, epsilon, seed, Stencil::FivePoint);
}

} // namespace evacast::models
