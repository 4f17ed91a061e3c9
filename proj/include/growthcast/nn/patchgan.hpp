#pragma once

#include <vector>

#include "growthcast/nn/layers.hpp"

namespace growthcast::nn {

struct DiscriminatorConfig {
    int patch_levels = 3;   // stride-2 downsampling blocks
    int base_channels = 64;

    void validate() const;
    // Logit-grid side for a square input: two stride-1 convs follow the
    // stride-2 pyramid, each trimming one pixel.
    int patch_grid_side(int input_size) const;
};

// Convolutional classifier over overlapping patches of the channel-stacked
// (condition, candidate) image. Produces an NxN logit grid whose mean is the
// image-level score.
class PatchDiscriminator {
public:
    PatchDiscriminator() = default;
    explicit PatchDiscriminator(const DiscriminatorConfig& config);

    void init(Rng& rng, double sigma = 0.02);

    // xy: 6-channel conditional input (input image stacked with real or
    // generated image). Returns the 1xNxN logit grid.
    Tensor forward(const Tensor& xy);
    Tensor backward(const Tensor& dgrid, bool accumulate);

    void zero_grad();
    std::vector<ParamRef> params();
    const DiscriminatorConfig& config() const { return cfg_; }

private:
    DiscriminatorConfig cfg_;
    std::vector<Conv2d> convs_;
    std::vector<InstanceNorm> norms_;  // after every conv except first and last
    std::vector<LeakyReLU> acts_;
};

double grid_mean(const Tensor& grid);

}  // namespace growthcast::nn
