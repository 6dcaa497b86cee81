#include "evacast/models/adam.hpp"

#include "evacast/core/error.hpp"

#include <cmath>

namespace evacast::models {

void zero_grads(const ParameterList& params) {
    for (auto* p : params) p->grad.setZero();
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void glorot_uniform(Matrix& m, double fan_in, double fan_out, Rng& rng) {
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = a * (2.0 * uniform01(rng) - 1.0);
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
    Matrix mask(rows, cols);
    const double keep = 1.0 - rate;
    const double scale = 1.0 / keep;
    for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = uniform01(rng) < keep ? scale : 0.0;
    return mask;
}

void AdamConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
    if (epochs < 1) throw ValidationError("epochs must be >= 1");
    if (batch_size < 1) throw ValidationError("batch_size must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw ValidationError("betas must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
}

Adam::Adam(ParameterList params, const AdamConfig& cfg) : params_(std::move(params)), cfg_(cfg) {
    cfg_.validate();
    for (const auto* p : params_) {
        m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
        v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
}

void Adam::step() {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    const double lr = cfg_.learning_rate;
    for (std::size_t k = 0; k < params_.size(); ++k) {
        auto& p = *params_[k];
        auto& m = m_[k];
        auto& v = v_[k];
        m = cfg_.beta1 * m + (1.0 - cfg_.beta1) * p.grad;
        v = cfg_.beta2 * v + (1.0 - cfg_.beta2) * p.grad.cwiseProduct(p.grad);
        p.value.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.epsilon);
    }
}

} // namespace evacast::models
