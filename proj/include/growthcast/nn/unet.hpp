#pragma once

#include <vector>

#include "growthcast/nn/layers.hpp"

namespace growthcast::nn {

struct GeneratorConfig {
    int input_size = 256;
    int base_channels = 64;
    int depth = 8;               // encoder/decoder levels; bottleneck = input_size / 2^depth
    double dropout_rate = 0.5;   // innermost three decoder levels

    void validate() const;
    int bottleneck_size() const { return input_size >> depth; }
    // Encoder output channels at level 1..depth (doubling, capped at 8x base).
    int level_channels(int level) const;
};

// Encoder-decoder with skip connections. Encoder level i halves the spatial
// side; decoder level i doubles it and its output is concatenated with the
// encoder feature of the same resolution. The outermost decoder ends in tanh;
// the innermost encoder and both outermost layers carry no normalization.
class UNetGenerator {
public:
    UNetGenerator() = default;
    explicit UNetGenerator(const GeneratorConfig& config);

    void init(Rng& rng, double sigma = 0.02);

    // stochastic=true keeps dropout live (the model's noise source); rng must
    // be non-null in that case.
    Tensor forward(const Tensor& x, bool stochastic, Rng* rng);

    // dL/dx of the last forward; parameter grads accumulate when requested.
    Tensor backward(const Tensor& dy, bool accumulate);

    void zero_grad();
    std::vector<ParamRef> params();
    const GeneratorConfig& config() const { return cfg_; }

    // Spatial side of the encoder output at each level of the last forward;
    // index 0 holds the input side.
    const std::vector<int>& encoder_sides() const { return enc_sides_; }
    const std::vector<int>& decoder_sides() const { return dec_sides_; }

private:
    GeneratorConfig cfg_;
    std::vector<Conv2d> enc_conv_;           // [1..depth]
    std::vector<InstanceNorm> enc_norm_;     // levels 2..depth-1
    std::vector<LeakyReLU> enc_act_;         // levels 2..depth
    std::vector<ConvTranspose2d> dec_conv_;  // [1..depth]
    std::vector<InstanceNorm> dec_norm_;     // levels 2..depth
    std::vector<Dropout> dec_drop_;          // levels depth-2..depth
    std::vector<ReLU> dec_act_;              // [1..depth]
    Tanh out_act_;

    std::vector<Tensor> enc_out_;  // [0..depth], 0 = input
    std::vector<int> enc_sides_, dec_sides_;

    bool has_enc_norm(int level) const { return level > 1 && level < cfg_.depth; }
    bool has_dropout(int level) const { return level >= cfg_.depth - 2; }
};

}  // namespace growthcast::nn
