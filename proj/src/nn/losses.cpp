#include "growthcast/nn/losses.hpp"

#include <cmath>

namespace growthcast::nn {

namespace {

double softplus(double z) {  // log(1 + e^z), overflow-safe
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void require_finite(const Tensor& logits) {
    for (std::size_t i = 0; i < logits.size(); ++i)
        if (!std::isfinite(logits.data()[i]))
            throw NumericError("non-finite discriminator logit");
}

}  // namespace

LossGrad bce_toward_real(const Tensor& logits) {
    require_finite(logits);
    LossGrad out;
    out.grad = Tensor(logits.channels(), logits.height(), logits.width());
    const double n = double(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        double z = logits.data()[i];
        out.value += softplus(-z);             // -log sigmoid(z)
        out.grad.data()[i] = (sigmoid(z) - 1.0) / n;
    }
    out.value /= n;
    return out;
}

LossGrad bce_toward_fake(const Tensor& logits) {
    require_finite(logits);
    LossGrad out;
    out.grad = Tensor(logits.channels(), logits.height(), logits.width());
    const double n = double(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        double z = logits.data()[i];
        out.value += softplus(z);              // -log(1 - sigmoid(z))
        out.grad.data()[i] = sigmoid(z) / n;
    }
    out.value /= n;
    return out;
}

double loss_cgan(const Tensor& d_real_logits, const Tensor& d_fake_logits, LossRole role) {
    if (role == LossRole::Discriminator)
        return bce_toward_real(d_real_logits).value + bce_toward_fake(d_fake_logits).value;
    return bce_toward_real(d_fake_logits).value;
}

LossGrad loss_l1(const Tensor& y, const Tensor& y_hat) {
    if (!y.same_shape(y_hat)) throw DataError("loss_l1: shape mismatch");
    LossGrad out;
    out.grad = Tensor(y.channels(), y.height(), y.width());
    const double n = double(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        double diff = y_hat.data()[i] - y.data()[i];
        out.value += std::abs(diff);
        out.grad.data()[i] = (diff > 0 ? 1.0 : (diff < 0 ? -1.0 : 0.0)) / n;
    }
    out.value /= n;
    return out;
}

}  // namespace growthcast::nn
