#include "growthcast/nn/unet.hpp"

#include <algorithm>

namespace growthcast::nn {

void GeneratorConfig::validate() const {
    if (depth < 1) throw ConfigError("generator: depth must be >= 1");
    if (base_channels < 1) throw ConfigError("generator: base_channels must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw ConfigError("generator: dropout_rate must be in [0, 1)");
    int bottleneck = input_size >> depth;
    if (bottleneck < 1 || (bottleneck << depth) != input_size)
        throw ConfigError("generator: input_size must be 2^depth times a bottleneck size >= 1");
}

int GeneratorConfig::level_channels(int level) const {
    int mult = std::min(1 << (level - 1), 8);
    return base_channels * mult;
}

UNetGenerator::UNetGenerator(const GeneratorConfig& config) : cfg_(config) {
    cfg_.validate();
    const int d = cfg_.depth;
    enc_conv_.resize(d + 1);
    enc_norm_.resize(d + 1);
    enc_act_.resize(d + 1);
    dec_conv_.resize(d + 1);
    dec_norm_.resize(d + 1);
    dec_drop_.resize(d + 1);
    dec_act_.resize(d + 1);

    for (int i = 1; i <= d; ++i) {
        int cin = i == 1 ? 3 : cfg_.level_channels(i - 1);
        enc_conv_[i] = Conv2d(cin, cfg_.level_channels(i), /*stride=*/2);
        if (has_enc_norm(i)) enc_norm_[i] = InstanceNorm(cfg_.level_channels(i));
    }
    for (int i = d; i >= 1; --i) {
        int cin = i == d ? cfg_.level_channels(d) : 2 * cfg_.level_channels(i);
        int cout = i == 1 ? 3 : cfg_.level_channels(i - 1);
        dec_conv_[i] = ConvTranspose2d(cin, cout);
        if (i > 1) dec_norm_[i] = InstanceNorm(cout);
        if (has_dropout(i)) dec_drop_[i].rate = cfg_.dropout_rate;
    }
}

void UNetGenerator::init(Rng& rng, double sigma) {
    for (int i = 1; i <= cfg_.depth; ++i) {
        enc_conv_[i].init(rng, sigma);
        if (has_enc_norm(i)) enc_norm_[i].init(rng, sigma);
    }
    for (int i = cfg_.depth; i >= 1; --i) {
        dec_conv_[i].init(rng, sigma);
        if (i > 1) dec_norm_[i].init(rng, sigma);
    }
}

Tensor UNetGenerator::forward(const Tensor& x, bool stochastic, Rng* rng) {
    if (x.channels() != 3 || x.height() != cfg_.input_size || x.width() != cfg_.input_size)
        throw DataError("generator: input must be 3x" + std::to_string(cfg_.input_size) + "x" +
                        std::to_string(cfg_.input_size) + ", got " +
                        std::to_string(x.channels()) + "x" + std::to_string(x.height()) + "x" +
                        std::to_string(x.width()));
    if (stochastic && cfg_.dropout_rate > 0.0 && rng == nullptr)
        throw ConfigError("generator: stochastic forward needs an RNG");

    const int d = cfg_.depth;
    enc_out_.assign(d + 1, Tensor());
    enc_sides_.assign(d + 1, 0);
    dec_sides_.assign(d + 1, 0);
    enc_out_[0] = x;
    enc_sides_[0] = x.height();

    for (int i = 1; i <= d; ++i) {
        Tensor t = i == 1 ? enc_out_[0] : enc_act_[i].forward(enc_out_[i - 1]);
        t = enc_conv_[i].forward(t);
        if (has_enc_norm(i)) t = enc_norm_[i].forward(t);
        enc_sides_[i] = t.height();
        enc_out_[i] = std::move(t);
    }

    Tensor cur = enc_out_[d];
    for (int i = d; i >= 2; --i) {
        Tensor u = dec_act_[i].forward(cur);
        u = dec_conv_[i].forward(u);
        u = dec_norm_[i].forward(u);
        if (has_dropout(i)) u = dec_drop_[i].forward(u, stochastic, rng);
        dec_sides_[i] = u.height();
        cur = concat_channels(u, enc_out_[i - 1]);
    }
    Tensor u = dec_act_[1].forward(cur);
    u = dec_conv_[1].forward(u);
    dec_sides_[1] = u.height();
    return out_act_.forward(u);
}

Tensor UNetGenerator::backward(const Tensor& dy, bool accumulate) {
    const int d = cfg_.depth;
    std::vector<Tensor> enc_grad(d + 1);

    Tensor g = out_act_.backward(dy);
    g = dec_conv_[1].backward(g, accumulate);
    g = dec_act_[1].backward(g);
    for (int i = 2; i <= d; ++i) {
        // g holds the grad of concat(dec_out_i, enc_out_[i-1]).
        auto [g_dec, g_skip] = split_channels(g, cfg_.level_channels(i - 1));
        enc_grad[i - 1] = std::move(g_skip);
        Tensor t = std::move(g_dec);
        if (has_dropout(i)) t = dec_drop_[i].backward(t);
        t = dec_norm_[i].backward(t, accumulate);
        t = dec_conv_[i].backward(t, accumulate);
        g = dec_act_[i].backward(t);
    }
    enc_grad[d] = std::move(g);

    for (int i = d; i >= 1; --i) {
        Tensor t = std::move(enc_grad[i]);
        if (has_enc_norm(i)) t = enc_norm_[i].backward(t, accumulate);
        t = enc_conv_[i].backward(t, accumulate);
        if (i > 1) {
            t = enc_act_[i].backward(t);
            double* acc = enc_grad[i - 1].data();
            const double* add = t.data();
            for (std::size_t j = 0; j < t.size(); ++j) acc[j] += add[j];
        } else {
            return t;  // dL/dx
        }
    }
    return Tensor();
}

void UNetGenerator::zero_grad() {
    for (int i = 1; i <= cfg_.depth; ++i) {
        enc_conv_[i].zero_grad();
        if (has_enc_norm(i)) enc_norm_[i].zero_grad();
        dec_conv_[i].zero_grad();
        if (i > 1) dec_norm_[i].zero_grad();
    }
}

std::vector<ParamRef> UNetGenerator::params() {
    std::vector<ParamRef> out;
    for (int i = 1; i <= cfg_.depth; ++i) {
        std::string enc_prefix = "generator/encoder_" + std::to_string(i);
        enc_conv_[i].collect(enc_prefix + "/conv", out);
        if (has_enc_norm(i)) enc_norm_[i].collect(enc_prefix + "/norm", out);
    }
    for (int i = cfg_.depth; i >= 1; --i) {
        std::string dec_prefix = "generator/decoder_" + std::to_string(i);
        dec_conv_[i].collect(dec_prefix + "/conv_transpose", out);
        if (i > 1) dec_norm_[i].collect(dec_prefix + "/norm", out);
    }
    return out;
}

}  // namespace growthcast::nn
