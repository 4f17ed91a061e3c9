#include "growthcast/nn/layers.hpp"

#include <cmath>
#include <cstring>

#include "growthcast/kernels/conv.hpp"

namespace growthcast::nn {

using kernels::conv_dims;

Conv2d::Conv2d(int cin_, int cout_, int stride_, int k_, int pad_)
    : cin(cin_), cout(cout_), k(k_), stride(stride_), pad(pad_),
      w(std::size_t(cout_) * cin_ * k_ * k_), b(cout_),
      dw(w.size(), 0.0), db(cout_, 0.0) {}

void Conv2d::init(Rng& rng, double sigma) {
    for (auto& v : w) v = rng.normal(0.0, sigma);
    for (auto& v : b) v = 0.0;
}

Tensor Conv2d::forward(const Tensor& x) {
    x_ = x;
    auto d = conv_dims(cin, x.height(), x.width(), cout, k, stride, pad);
    Tensor y(cout, d.hout, d.wout);
    kernels::conv2d_forward(x.data(), w.data(), b.data(), y.data(), d);
    return y;
}

Tensor Conv2d::backward(const Tensor& dy, bool accumulate) {
    auto d = conv_dims(cin, x_.height(), x_.width(), cout, k, stride, pad);
    if (accumulate)
        kernels::conv2d_backward_weights(x_.data(), dy.data(), dw.data(), db.data(), d);
    Tensor dx(cin, x_.height(), x_.width());
    kernels::conv2d_backward_input(dy.data(), w.data(), dx.data(), d);
    return dx;
}

void Conv2d::zero_grad() {
    std::fill(dw.begin(), dw.end(), 0.0);
    std::fill(db.begin(), db.end(), 0.0);
}

void Conv2d::collect(const std::string& prefix, std::vector<ParamRef>& out) {
    out.push_back({prefix + "/weight", &w, &dw, {cout, cin, k, k}});
    out.push_back({prefix + "/bias", &b, &db, {cout}});
}

ConvTranspose2d::ConvTranspose2d(int cin_, int cout_, int stride_, int k_, int pad_)
    : cin(cin_), cout(cout_), k(k_), stride(stride_), pad(pad_),
      w(std::size_t(cin_) * cout_ * k_ * k_), b(cout_),
      dw(w.size(), 0.0), db(cout_, 0.0) {}

void ConvTranspose2d::init(Rng& rng, double sigma) {
    for (auto& v : w) v = rng.normal(0.0, sigma);
    for (auto& v : b) v = 0.0;
}

Tensor ConvTranspose2d::forward(const Tensor& x) {
    x_ = x;
    int hout = x.height() * stride, wout = x.width() * stride;
    // View as the gradient pass of a conv that maps our output to our input.
    auto d = conv_dims(cout, hout, wout, cin, k, stride, pad);
    Tensor y(cout, hout, wout);
    kernels::conv2d_backward_input(x.data(), w.data(), y.data(), d);
    double* p = y.data();
    std::size_t plane = std::size_t(hout) * wout;
    for (int c = 0; c < cout; ++c)
        for (std::size_t i = 0; i < plane; ++i) p[c * plane + i] += b[c];
    return y;
}

Tensor ConvTranspose2d::backward(const Tensor& dy, bool accumulate) {
    auto d = conv_dims(cout, dy.height(), dy.width(), cin, k, stride, pad);
    if (accumulate) {
        kernels::conv2d_backward_weights(dy.data(), x_.data(), dw.data(), nullptr, d);
        std::size_t plane = std::size_t(dy.height()) * dy.width();
        for (int c = 0; c < cout; ++c) {
            double acc = 0.0;
            const double* p = dy.data() + c * plane;
            for (std::size_t i = 0; i < plane; ++i) acc += p[i];
            db[c] += acc;
        }
    }
    Tensor dx(cin, x_.height(), x_.width());
    kernels::conv2d_forward(dy.data(), w.data(), nullptr, dx.data(), d);
    return dx;
}

void ConvTranspose2d::zero_grad() {
    std::fill(dw.begin(), dw.end(), 0.0);
    std::fill(db.begin(), db.end(), 0.0);
}

void ConvTranspose2d::collect(const std::string& prefix, std::vector<ParamRef>& out) {
    out.push_back({prefix + "/weight", &w, &dw, {cin, cout, k, k}});
    out.push_back({prefix + "/bias", &b, &db, {cout}});
}

InstanceNorm::InstanceNorm(int channels_)
    : channels(channels_), gamma(channels_, 1.0), beta(channels_, 0.0),
      dgamma(channels_, 0.0), dbeta(channels_, 0.0) {}

void InstanceNorm::init(Rng& rng, double sigma) {
    for (auto& v : gamma) v = rng.normal(1.0, sigma);
    for (auto& v : beta) v = 0.0;
}

Tensor InstanceNorm::forward(const Tensor& x) {
    const std::size_t n = std::size_t(x.height()) * x.width();
    xhat_ = Tensor(x.channels(), x.height(), x.width());
    invstd_.assign(channels, 0.0);
    Tensor y(x.channels(), x.height(), x.width());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < channels; ++c) {
        const double* xp = x.channel(c);
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += xp[i];
        mean /= double(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += (xp[i] - mean) * (xp[i] - mean);
        var /= double(n);
        const double inv = 1.0 / std::sqrt(var + eps);
        invstd_[c] = inv;
        double* xh = xhat_.channel(c);
        double* yp = y.channel(c);
        for (std::size_t i = 0; i < n; ++i) {
            xh[i] = (xp[i] - mean) * inv;
            yp[i] = gamma[c] * xh[i] + beta[c];
        }
    }
    return y;
}

Tensor InstanceNorm::backward(const Tensor& dy, bool accumulate) {
    const std::size_t n = std::size_t(dy.height()) * dy.width();
    Tensor dx(dy.channels(), dy.height(), dy.width());
#pragma omp parallel for schedule(static)
    for (int c = 0; c < channels; ++c) {
        const double* dyp = dy.channel(c);
        const double* xh = xhat_.channel(c);
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum_dy += dyp[i];
            sum_dy_xhat += dyp[i] * xh[i];
        }
        if (accumulate) {
            dbeta[c] += sum_dy;
            dgamma[c] += sum_dy_xhat;
        }
        const double g = gamma[c];
        const double inv = invstd_[c];
        const double mean_dy = sum_dy / double(n);
        const double mean_dy_xhat = sum_dy_xhat / double(n);
        double* dxp = dx.channel(c);
        for (std::size_t i = 0; i < n; ++i)
            dxp[i] = g * inv * (dyp[i] - mean_dy - xh[i] * mean_dy_xhat);
    }
    return dx;
}

void InstanceNorm::zero_grad() {
    std::fill(dgamma.begin(), dgamma.end(), 0.0);
    std::fill(dbeta.begin(), dbeta.end(), 0.0);
}

void InstanceNorm::collect(const std::string& prefix, std::vector<ParamRef>& out) {
    out.push_back({prefix + "/gamma", &gamma, &dgamma, {channels}});
    out.push_back({prefix + "/beta", &beta, &dbeta, {channels}});
}

Tensor LeakyReLU::forward(const Tensor& x) {
    x_ = x;
    Tensor y = x;
    double* p = y.data();
    for (std::size_t i = 0; i < y.size(); ++i)
        if (p[i] < 0) p[i] *= alpha;
    return y;
}

Tensor LeakyReLU::backward(const Tensor& dy) const {
    Tensor dx = dy;
    double* p = dx.data();
    const double* xp = x_.data();
    for (std::size_t i = 0; i < dx.size(); ++i)
        if (xp[i] < 0) p[i] *= alpha;
    return dx;
}

Tensor ReLU::forward(const Tensor& x) {
    x_ = x;
    Tensor y = x;
    double* p = y.data();
    for (std::size_t i = 0; i < y.size(); ++i)
        if (p[i] < 0) p[i] = 0.0;
    return y;
}

Tensor ReLU::backward(const Tensor& dy) const {
    Tensor dx = dy;
    double* p = dx.data();
    const double* xp = x_.data();
    for (std::size_t i = 0; i < dx.size(); ++i)
        if (xp[i] < 0) p[i] = 0.0;
    return dx;
}

Tensor Tanh::forward(const Tensor& x) {
    Tensor y = x;
    double* p = y.data();
    for (std::size_t i = 0; i < y.size(); ++i) p[i] = std::tanh(p[i]);
    y_ = y;
    return y;
}

Tensor Tanh::backward(const Tensor& dy) const {
    Tensor dx = dy;
    double* p = dx.data();
    const double* yp = y_.data();
    for (std::size_t i = 0; i < dx.size(); ++i) p[i] *= 1.0 - yp[i] * yp[i];
    return dx;
}

Tensor Dropout::forward(const Tensor& x, bool active, Rng* rng) {
    if (!active || rate <= 0.0) {
        mask_.clear();
        return x;
    }
    const double keep = 1.0 - rate;
    mask_.resize(x.size());
    Tensor y = x;
    double* p = y.data();
    for (std::size_t i = 0; i < y.size(); ++i) {
        mask_[i] = rng->bernoulli(keep) ? 1.0 / keep : 0.0;
        p[i] *= mask_[i];
    }
    return y;
}

Tensor Dropout::backward(const Tensor& dy) const {
    if (mask_.empty()) return dy;
    Tensor dx = dy;
    double* p = dx.data();
    for (std::size_t i = 0; i < dx.size(); ++i) p[i] *= mask_[i];
    return dx;
}

std::pair<Tensor, Tensor> split_channels(const Tensor& t, int first_channels) {
    Tensor a(first_channels, t.height(), t.width());
    Tensor b(t.channels() - first_channels, t.height(), t.width());
    std::size_t plane = std::size_t(t.height()) * t.width();
    std::memcpy(a.data(), t.data(), a.size() * sizeof(double));
    std::memcpy(b.data(), t.data() + first_channels * plane, b.size() * sizeof(double));
    return {std::move(a), std::move(b)};
}

}  // namespace growthcast::nn
