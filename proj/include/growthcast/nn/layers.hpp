#pragma once

#include <string>
#include <vector>

#include "growthcast/rng.hpp"
#include "growthcast/tensor.hpp"

namespace growthcast::nn {

// Named view into a layer's parameter/gradient storage; optimizers and the
// checkpoint writer address parameters through this.
struct ParamRef {
    std::string name;
    std::vector<double>* value;
    std::vector<double>* grad;
    std::vector<int> shape;
};

struct Conv2d {
    int cin = 0, cout = 0, k = 4, stride = 2, pad = 1;
    std::vector<double> w, b, dw, db;

    Conv2d() = default;
    Conv2d(int cin_, int cout_, int stride_, int k_ = 4, int pad_ = 1);

    void init(Rng& rng, double sigma);
    Tensor forward(const Tensor& x);
    // Returns dL/dx; accumulates dw/db only when accumulate is set.
    Tensor backward(const Tensor& dy, bool accumulate);
    void zero_grad();
    void collect(const std::string& prefix, std::vector<ParamRef>& out);

private:
    Tensor x_;
};

// Fractionally-strided convolution; weights are stored [cin, cout, k, k] so
// forward/backward reduce to the plain conv kernels with roles swapped.
struct ConvTranspose2d {
    int cin = 0, cout = 0, k = 4, stride = 2, pad = 1;
    std::vector<double> w, b, dw, db;

    ConvTranspose2d() = default;
    ConvTranspose2d(int cin_, int cout_, int stride_ = 2, int k_ = 4, int pad_ = 1);

    void init(Rng& rng, double sigma);
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy, bool accumulate);
    void zero_grad();
    void collect(const std::string& prefix, std::vector<ParamRef>& out);

private:
    Tensor x_;
};

// Per-feature-map normalization over the spatial extent (batch of one).
struct InstanceNorm {
    int channels = 0;
    double eps = 1e-5;
    std::vector<double> gamma, beta, dgamma, dbeta;

    InstanceNorm() = default;
    explicit InstanceNorm(int channels_);

    void init(Rng& rng, double sigma);
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy, bool accumulate);
    void zero_grad();
    void collect(const std::string& prefix, std::vector<ParamRef>& out);

private:
    Tensor xhat_;
    std::vector<double> invstd_;
};

struct LeakyReLU {
    double alpha = 0.2;
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    Tensor x_;
};

struct ReLU {
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    Tensor x_;
};

struct Tanh {
    Tensor forward(const Tensor& x);
    Tensor backward(const Tensor& dy) const;

private:
    Tensor y_;
};

// Inverted dropout: active draws keep-masks scaled by 1/(1-rate); inactive is
// the identity.
struct Dropout {
    double rate = 0.5;
    Tensor forward(const Tensor& x, bool active, Rng* rng);
    Tensor backward(const Tensor& dy) const;

private:
    std::vector<double> mask_;  // empty when last forward was inactive
};

// Splits dy of a channel concat back into its two parts.
std::pair<Tensor, Tensor> split_channels(const Tensor& t, int first_channels);

}  // namespace growthcast::nn
