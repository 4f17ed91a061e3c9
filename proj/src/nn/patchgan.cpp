#include "growthcast/nn/patchgan.hpp"

#include <algorithm>

namespace growthcast::nn {

void DiscriminatorConfig::validate() const {
    if (patch_levels < 1) throw ConfigError("discriminator: patch_levels must be >= 1");
    if (base_channels < 1) throw ConfigError("discriminator: base_channels must be >= 1");
}

int DiscriminatorConfig::patch_grid_side(int input_size) const {
    int side = input_size;
    for (int i = 0; i < patch_levels; ++i) side = (side + 2 - 4) / 2 + 1;
    side = side - 1;  // stride-1 4x4 pad-1 head
    side = side - 1;  // logit conv
    if (side < 1)
        throw ConfigError("discriminator: input size " + std::to_string(input_size) +
                          " too small for " + std::to_string(patch_levels) + " patch levels");
    return side;
}

PatchDiscriminator::PatchDiscriminator(const DiscriminatorConfig& config) : cfg_(config) {
    cfg_.validate();
    const int L = cfg_.patch_levels;
    auto ch = [&](int i) { return cfg_.base_channels * std::min(1 << i, 8); };
    for (int i = 0; i < L; ++i)
        convs_.emplace_back(i == 0 ? 6 : ch(i - 1), ch(i), /*stride=*/2);
    convs_.emplace_back(ch(L - 1), ch(L), /*stride=*/1);
    convs_.emplace_back(ch(L), 1, /*stride=*/1);
    for (std::size_t i = 1; i + 1 < convs_.size(); ++i) norms_.emplace_back(convs_[i].cout);
    acts_.resize(convs_.size() - 1);
}

void PatchDiscriminator::init(Rng& rng, double sigma) {
    for (auto& c : convs_) c.init(rng, sigma);
    for (auto& n : norms_) n.init(rng, sigma);
}

Tensor PatchDiscriminator::forward(const Tensor& xy) {
    if (xy.channels() != 6)
        throw DataError("discriminator: expected 6-channel conditional input, got " +
                        std::to_string(xy.channels()));
    Tensor t = xy;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
        t = convs_[i].forward(t);
        if (i >= 1 && i + 1 < convs_.size()) t = norms_[i - 1].forward(t);
        if (i + 1 < convs_.size()) t = acts_[i].forward(t);
    }
    return t;
}

Tensor PatchDiscriminator::backward(const Tensor& dgrid, bool accumulate) {
    Tensor g = dgrid;
    for (std::size_t i = convs_.size(); i-- > 0;) {
        if (i + 1 < convs_.size()) g = acts_[i].backward(g);
        if (i >= 1 && i + 1 < convs_.size()) g = norms_[i - 1].backward(g, accumulate);
        g = convs_[i].backward(g, accumulate);
    }
    return g;
}

void PatchDiscriminator::zero_grad() {
    for (auto& c : convs_) c.zero_grad();
    for (auto& n : norms_) n.zero_grad();
}

std::vector<ParamRef> PatchDiscriminator::params() {
    std::vector<ParamRef> out;
    for (std::size_t i = 0; i < convs_.size(); ++i) {
        std::string prefix = "discriminator/layer_" + std::to_string(i + 1);
        convs_[i].collect(prefix + "/conv", out);
        if (i >= 1 && i + 1 < convs_.size()) norms_[i - 1].collect(prefix + "/norm", out);
    }
    return out;
}

double grid_mean(const Tensor& grid) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) acc += grid.data()[i];
    return acc / double(grid.size());
}

}  // namespace growthcast::nn
