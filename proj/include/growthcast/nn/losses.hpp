#pragma once

#include "growthcast/tensor.hpp"

namespace growthcast::nn {

enum class LossRole { Generator, Discriminator };

struct LossGrad {
    double value = 0.0;
    Tensor grad;
};

// -mean log sigmoid(z): the "classify as real" term. Gradient w.r.t. z.
LossGrad bce_toward_real(const Tensor& logits);

// -mean log(1 - sigmoid(z)): the "classify as fake" term.
LossGrad bce_toward_fake(const Tensor& logits);

// Adversarial loss over patch-logit grids, as a value to be minimized by the
// given role. The discriminator sees both grids; the generator uses the
// non-saturating form and only reads d_fake_logits. Throws NumericError on
// non-finite logits.
double loss_cgan(const Tensor& d_real_logits, const Tensor& d_fake_logits, LossRole role);

// Mean absolute difference; gradient is w.r.t. y_hat.
LossGrad loss_l1(const Tensor& y, const Tensor& y_hat);

}  // namespace growthcast::nn
