#pragma once

#include "evacast/models/tensor.hpp"

#include <cstddef>
#include <vector>

namespace evacast::models {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t batch_size = 32;
    std::size_t epochs = 150;

    void validate() const;
};

class Adam {
public:
    Adam(ParameterList params, const AdamConfig& cfg);

    // One update from the accumulated gradients.
    void step();
    long long steps() const { return t_; }

private:
    ParameterList params_;
    AdamConfig cfg_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    long long t_ = 0;
};

} // namespace evacast::models
