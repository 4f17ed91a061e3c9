#pragma once

#include <vector>

#include "growthcast/nn/layers.hpp"

namespace growthcast::nn {

// Adaptive-moment gradient descent with bias correction.
class AdamOptimizer {
public:
    AdamOptimizer(const std::vector<ParamRef>& params, double beta1 = 0.5, double beta2 = 0.999,
                  double eps = 1e-8);

    void step(const std::vector<ParamRef>& params, double lr);
    long step_count() const { return t_; }

private:
    double beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace growthcast::nn
