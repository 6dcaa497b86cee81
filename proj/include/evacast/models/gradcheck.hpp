#pragma once

#include "evacast/models/mlp.hpp"
#include "evacast/models/recurrent.hpp"

#include <cstdint>
#include <functional>

namespace evacast::models {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t n_checked = 0;
    std::size_t n_skipped = 0; // stencil straddled a kink at every step tried
};

// Fingerprint of the piecewise-linear regime (e.g. ReLU on/off pattern).
using KinkProbe = std::function<std::vector<std::uint8_t>()>;

enum class Stencil { Central, FivePoint };

// Finite differences on a random subset of n_params scalars (all of them when
// fewer exist). Relative error is |a - n| / max(|a| + |n|, 1e-12).
// `backprop` must fill the analytic gradients; `loss` must be deterministic.
// With a probe, a stencil whose points change the probe's fingerprint is
// retried at epsilon/10 and epsilon/100; if all straddle a kink the scalar is
// skipped and the next random one is drawn.
GradCheckResult gradient_check(const ParameterList& params, const std::function<double()>& loss,
                               const std::function<void()>& backprop, std::size_t n_params = 200,
                               double epsilon = 1e-5, std::uint64_t seed = 0, Stencil stencil = Stencil::Central,
                               const KinkProbe& probe = {});

// ReLU network: central differences with kink detection on the hidden units.
GradCheckResult gradient_check(Mlp& model, const Matrix& x, const std::vector<int>& y, std::size_t n_params = 200,
                               double epsilon = 1e-4, std::uint64_t seed = 0);

// Smooth cells with many vanishing gradients: a wide five-point stencil keeps
// roundoff below the 1e-9 gradients of early time steps.
// Dropout masks are replayed from dropout_seed on every evaluation when active.
GradCheckResult gradient_check(SequenceModel& model, const SequenceBatch& xs, const Vector& y,
                               bool dropout_active = false, std::uint64_t dropout_seed = 0,
                               std::size_t n_params = 200, double epsilon = 1e-3, std::uint64_t seed = 0);

} // namespace evacast::models
