#pragma once

#include "evacast/models/tensor.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace evacast::models {

inline constexpr std::size_t kHiddenUnits = 64;

struct MlpShape {
    std::size_t input_dim = 14;
    std::vector<std::size_t> hidden{kHiddenUnits, kHiddenUnits, kHiddenUnits};
    std::size_t n_classes = 3;
};

// ReLU hidden layers, softmax output. Layer k maps through W_k (in x out) and b_k (1 x out).
class Mlp {
public:
    Mlp() = default;
    Mlp(const MlpShape& shape, std::uint64_t seed); // Glorot-uniform weights, zero biases

    const MlpShape& shape() const { return shape_; }
    std::size_t input_dim() const { return shape_.input_dim; }
    std::size_t n_layers() const { return weights_.size(); }

    // B x input_dim -> B x n_classes probabilities.
    Matrix forward(const Matrix& x) const;
    std::vector<double> predict_proba(std::span<const double> x) const;

    // Mean cross-entropy over the batch; gradients are overwritten.
    double loss_and_grad(const Matrix& x, const std::vector<int>& y);
    double loss(const Matrix& x, const std::vector<int>& y) const;

    // 1 where a hidden ReLU is active, per sample and unit, all hidden layers.
    std::vector<std::uint8_t> relu_pattern(const Matrix& x) const;

    ParameterList parameters();
    std::vector<const Parameter*> parameters() const;

    Parameter& weight(std::size_t layer) { return weights_.at(layer); }
    Parameter& bias(std::size_t layer) { return biases_.at(layer); }

private:
    void check_input(const Matrix& x) const;

    MlpShape shape_;
    std::vector<Parameter> weights_;
    std::vector<Parameter> biases_;
};

// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& logits);

// Probabilities for one input vector; throws on a length mismatch.
std::vector<double> mlp_forward(const Mlp& model, std::span<const double> x);

} // namespace evacast::models
