#include "evacast/models/mlp.hpp"

#include "evacast/core/error.hpp"

#include <cmath>

namespace evacast::models {

Matrix softmax_rows(const Matrix& logits) {
    Matrix p(logits.rows(), logits.cols());
    for (Eigen::Index r = 0; r < logits.rows(); ++r) {
        const double mx = logits.row(r).maxCoeff();
        p.row(r) = (logits.row(r).array() - mx).exp();
        p.row(r) /= p.row(r).sum();
    }
    return p;
}

Mlp::Mlp(const MlpShape& shape, std::uint64_t seed) : shape_(shape) {
    if (shape.input_dim == 0 || shape.n_classes < 2) throw ValidationError("mlp: bad input or output size");
    Rng rng(derive_seed(seed, 0x6d6c70));
    std::size_t in = shape.input_dim;
    std::vector<std::size_t> outs = shape.hidden;
    outs.push_back(shape.n_classes);
    for (std::size_t k = 0; k < outs.size(); ++k) {
        if (outs[k] == 0) throw ValidationError("mlp: hidden layers must be non-empty");
        const auto r = static_cast<Eigen::Index>(in), c = static_cast<Eigen::Index>(outs[k]);
        weights_.emplace_back("W" + std::to_string(k), r, c);
        biases_.emplace_back("b" + std::to_string(k), 1, c);
        glorot_uniform(weights_.back().value, static_cast<double>(in), static_cast<double>(outs[k]), rng);
        in = outs[k];
    }
}

void Mlp::check_input(const Matrix& x) const {
    if (weights_.empty()) throw ValidationError("mlp: model is not initialized");
    if (static_cast<std::size_t>(x.cols()) != shape_.input_dim)
        throw ValidationError("mlp: input width " + std::to_string(x.cols()) + " does not match " +
                              std::to_string(shape_.input_dim));
}

Matrix Mlp::forward(const Matrix& x) const {
    check_input(x);
    Matrix a = x;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        Matrix z = a * weights_[k].value;
        z.rowwise() += biases_[k].value.row(0);
        if (k + 1 < weights_.size()) z = z.cwiseMax(0.0);
        a = std::move(z);
    }
    return softmax_rows(a);
}

std::vector<std::uint8_t> Mlp::relu_pattern(const Matrix& x) const {
    check_input(x);
    std::vector<std::uint8_t> on;
    Matrix a = x;
    for (std::size_t k = 0; k + 1 < weights_.size(); ++k) {
        Matrix z = a * weights_[k].value;
        z.rowwise() += biases_[k].value.row(0);
        for (Eigen::Index i = 0; i < z.size(); ++i) on.push_back(z.data()[i] > 0.0);
        a = z.cwiseMax(0.0);
    }
    return on;
}

std::vector<double> Mlp::predict_proba(std::span<const double> x) const {
    Matrix m(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = x[i];
    const Matrix p = forward(m);
    return {p.data(), p.data() + p.size()};
}

std::vector<double> mlp_forward(const Mlp& model, std::span<const double> x) { return model.predict_proba(x); }

namespace {

double cross_entropy(const Matrix& p, const std::vector<int>& y) {
    double loss = 0.0;
    for (Eigen::Index r = 0; r < p.rows(); ++r)
        loss -= std::log(std::max(p(r, y[static_cast<std::size_t>(r)]), 1e-300));
    return loss / static_cast<double>(p.rows());
}

void check_labels(const Matrix& x, const std::vector<int>& y, std::size_t n_classes) {
    if (static_cast<std::size_t>(x.rows()) != y.size()) throw ValidationError("mlp: label count mismatch");
    for (int c : y)
        if (c < 0 || static_cast<std::size_t>(c) >= n_classes) throw ValidationError("mlp: label out of range");
}

} // namespace

double Mlp::loss(const Matrix& x, const std::vector<int>& y) const {
    check_labels(x, y, shape_.n_classes);
    return cross_entropy(forward(x), y);
}

double Mlp::loss_and_grad(const Matrix& x, const std::vector<int>& y) {
    check_input(x);
    check_labels(x, y, shape_.n_classes);
    const std::size_t L = weights_.size();
    std::vector<Matrix> acts;
    acts.reserve(L + 1);
    acts.push_back(x);
    for (std::size_t k = 0; k < L; ++k) {
        Matrix z = acts.back() * weights_[k].value;
        z.rowwise() += biases_[k].value.row(0);
        if (k + 1 < L) z = z.cwiseMax(0.0);
        acts.push_back(std::move(z));
    }
    const Matrix p = softmax_rows(acts.back());
    const double loss = cross_entropy(p, y);

    const double inv_b = 1.0 / static_cast<double>(x.rows());
    Matrix delta = p;
    for (Eigen::Index r = 0; r < delta.rows(); ++r) delta(r, y[static_cast<std::size_t>(r)]) -= 1.0;
    delta *= inv_b;
    for (std::size_t k = L; k-- > 0;) {
        weights_[k].grad.noalias() = acts[k].transpose() * delta;
        biases_[k].grad = delta.colwise().sum();
        if (k == 0) break;
        Matrix back = delta * weights_[k].value.transpose();
        // ReLU derivative from the stored post-activation.
        delta = back.cwiseProduct((acts[k].array() > 0.0).cast<double>().matrix());
    }
    return loss;
}

ParameterList Mlp::parameters() {
    ParameterList out;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        out.push_back(&weights_[k]);
        out.push_back(&biases_[k]);
    }
    return out;
}

std::vector<const Parameter*> Mlp::parameters() const {
    std::vector<const Parameter*> out;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        out.push_back(&weights_[k]);
        out.push_back(&biases_[k]);
    }
    return out;
}

} // namespace evacast::models
