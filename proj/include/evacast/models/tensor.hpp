#pragma once

#include "evacast/core/rng.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace evacast::models {

// Row-major double matrices; a batch of B vectors is a B x D matrix.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor>;

struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;

    Parameter() = default;
    Parameter(std::string n, Eigen::Index rows, Eigen::Index cols)
        : name(std::move(n)), value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}

    Eigen::Index size() const { return value.size(); }
};

using ParameterList = std::vector<Parameter*>;

void zero_grads(const ParameterList& params);
bool all_finite(const Matrix& m);

// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
void glorot_uniform(Matrix& m, double fan_in, double fan_out, Rng& rng);

// Inverted dropout mask: entries 0 with probability rate, else 1/(1-rate).
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace evacast::models
