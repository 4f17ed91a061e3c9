#include "growthcast/nn/adam.hpp"

#include <cmath>

#include "growthcast/common.hpp"

namespace growthcast::nn {

AdamOptimizer::AdamOptimizer(const std::vector<ParamRef>& params, double beta1, double beta2,
                             double eps)
    : beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const auto& p : params) {
        m_.emplace_back(p.value->size(), 0.0);
        v_.emplace_back(p.value->size(), 0.0);
    }
}

void AdamOptimizer::step(const std::vector<ParamRef>& params, double lr) {
    if (params.size() != m_.size())
        throw ConfigError("optimizer: parameter set changed since construction");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, double(t_));
    const double bc2 = 1.0 - std::pow(beta2_, double(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& value = *params[i].value;
        const auto& grad = *params[i].grad;
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < value.size(); ++j) {
            double g = grad[j];
            m[j] = beta1_ * m[j] + (1.0 - beta1_) * g;
            v[j] = beta2_ * v[j] + (1.0 - beta2_) * g * g;
            value[j] -= lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + eps_);
        }
    }
}

}  // namespace growthcast::nn
