#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "growthcast/common.hpp"

namespace growthcast {

// Dense channels-first (C,H,W) tensor of doubles. Images are 3-channel RGB
// with values in [-1, 1]; feature maps inside the networks use the same type.
class Tensor {
public:
    Tensor() = default;
    Tensor(int channels, int height, int width)
        : c_(channels), h_(height), w_(width),
          v_(std::size_t(channels) * height * width, 0.0) {
        assert(channels > 0 && height > 0 && width > 0);
    }

    int channels() const { return c_; }
    int height() const { return h_; }
    int width() const { return w_; }
    std::size_t size() const { return v_.size(); }
    bool empty() const { return v_.empty(); }

    double& at(int c, int y, int x) { return v_[(std::size_t(c) * h_ + y) * w_ + x]; }
    double at(int c, int y, int x) const { return v_[(std::size_t(c) * h_ + y) * w_ + x]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    double* channel(int c) { return v_.data() + std::size_t(c) * h_ * w_; }
    const double* channel(int c) const { return v_.data() + std::size_t(c) * h_ * w_; }

    bool same_shape(const Tensor& o) const { return c_ == o.c_ && h_ == o.h_ && w_ == o.w_; }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.c_ == b.c_ && a.h_ == b.h_ && a.w_ == b.w_ && a.v_ == b.v_;
    }

private:
    int c_ = 0, h_ = 0, w_ = 0;
    std::vector<double> v_;
};

// Throws DataError unless t is a well-formed image tensor: 3 channels,
// positive dimensions, all values in [-1, 1].
void validate_image_tensor(const Tensor& t, const std::string& what);

// Stacks two tensors along the channel axis.
Tensor concat_channels(const Tensor& a, const Tensor& b);

}  // namespace growthcast
