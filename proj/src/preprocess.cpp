#include "growthcast/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "growthcast/image_io.hpp"

namespace growthcast {

void AugmentConfig::validate() const {
    if (target_size <= 0) throw ConfigError("augment: target_size must be > 0");
    for (int r : rotations_deg)
        if (r != 0 && r != 180)
            throw ConfigError("augment: rotations are limited to 0 and 180 degrees");
    if (rotations_deg.empty()) throw ConfigError("augment: rotation set may not be empty");
    if (!(crop_scale_min > 0.0 && crop_scale_min <= 1.0))
        throw ConfigError("augment: crop_scale_min must be in (0, 1]");
}

Tensor pad_to_square(const Tensor& t) {
    int h = t.height(), w = t.width();
    if (h == w) return t;
    int side = std::max(h, w);
    Tensor out(t.channels(), side, side);
    // Black is -1 after normalization.
    std::fill(out.data(), out.data() + out.size(), -1.0);
    int off_y = (side - h) / 2;
    int off_x = (side - w) / 2;
    for (int c = 0; c < t.channels(); ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.at(c, y + off_y, x + off_x) = t.at(c, y, x);
    return out;
}

Tensor load_and_pad(const std::filesystem::path& path) {
    return pad_to_square(raster_to_tensor(read_raster(path)));
}

Tensor resize_bilinear(const Tensor& t, int out_height, int out_width) {
    if (t.height() == out_height && t.width() == out_width) return t;
    Tensor out(t.channels(), out_height, out_width);
    double sy = double(t.height()) / out_height;
    double sx = double(t.width()) / out_width;
    for (int c = 0; c < t.channels(); ++c) {
        const double* src = t.channel(c);
        double* dst = out.channel(c);
        for (int oy = 0; oy < out_height; ++oy) {
            double fy = (oy + 0.5) * sy - 0.5;
            int y0 = int(std::floor(fy));
            double wy = fy - y0;
            int y0c = std::clamp(y0, 0, t.height() - 1);
            int y1c = std::clamp(y0 + 1, 0, t.height() - 1);
            for (int ox = 0; ox < out_width; ++ox) {
                double fx = (ox + 0.5) * sx - 0.5;
                int x0 = int(std::floor(fx));
                double wx = fx - x0;
                int x0c = std::clamp(x0, 0, t.width() - 1);
                int x1c = std::clamp(x0 + 1, 0, t.width() - 1);
                double top = src[std::size_t(y0c) * t.width() + x0c] * (1 - wx) +
                             src[std::size_t(y0c) * t.width() + x1c] * wx;
                double bot = src[std::size_t(y1c) * t.width() + x0c] * (1 - wx) +
                             src[std::size_t(y1c) * t.width() + x1c] * wx;
                dst[std::size_t(oy) * out_width + ox] = top * (1 - wy) + bot * wy;
            }
        }
    }
    return out;
}

TransformSample sample_transform(int source_height, int source_width,
                                 const AugmentConfig& config, Rng& rng) {
    config.validate();
    TransformSample s;
    if (config.random_crop) {
        int side = std::min(source_height, source_width);
        double frac = rng.uniform(config.crop_scale_min, 1.0);
        s.crop_side = std::max(1, int(std::lround(frac * side)));
        s.crop_side = std::min(s.crop_side, side);
        s.crop_y = rng.uniform_int(source_height - s.crop_side + 1);
        s.crop_x = rng.uniform_int(source_width - s.crop_side + 1);
    }
    s.flip_h = config.flip_horizontal && rng.bernoulli(0.5);
    s.flip_v = config.flip_vertical && rng.bernoulli(0.5);
    std::vector<int> rots(config.rotations_deg.begin(), config.rotations_deg.end());
    s.rotation_deg = rots[rng.uniform_int(int(rots.size()))];
    return s;
}

Tensor apply_transform(const Tensor& t, const TransformSample& s, int target_size) {
    Tensor work = t;
    if (s.crop_side > 0) {
        Tensor cropped(t.channels(), s.crop_side, s.crop_side);
        for (int c = 0; c < t.channels(); ++c)
            for (int y = 0; y < s.crop_side; ++y)
                for (int x = 0; x < s.crop_side; ++x)
                    cropped.at(c, y, x) = t.at(c, y + s.crop_y, x + s.crop_x);
        work = std::move(cropped);
    }
    if (s.flip_h) {
        Tensor flipped(work.channels(), work.height(), work.width());
        for (int c = 0; c < work.channels(); ++c)
            for (int y = 0; y < work.height(); ++y)
                for (int x = 0; x < work.width(); ++x)
                    flipped.at(c, y, x) = work.at(c, y, work.width() - 1 - x);
        work = std::move(flipped);
    }
    if (s.flip_v) {
        Tensor flipped(work.channels(), work.height(), work.width());
        for (int c = 0; c < work.channels(); ++c)
            for (int y = 0; y < work.height(); ++y)
                for (int x = 0; x < work.width(); ++x)
                    flipped.at(c, y, x) = work.at(c, work.height() - 1 - y, x);
        work = std::move(flipped);
    }
    if (s.rotation_deg == 180) {
        // (i, j) -> (H-1-i, W-1-j)
        Tensor rot(work.channels(), work.height(), work.width());
        for (int c = 0; c < work.channels(); ++c)
            for (int y = 0; y < work.height(); ++y)
                for (int x = 0; x < work.width(); ++x)
                    rot.at(c, y, x) = work.at(c, work.height() - 1 - y, work.width() - 1 - x);
        work = std::move(rot);
    }
    return resize_bilinear(work, target_size, target_size);
}

std::pair<Tensor, Tensor> augment_pair(const Tensor& a, const Tensor& b,
                                       const AugmentConfig& config, Rng& rng) {
    config.validate();
    if (!a.same_shape(b)) throw DataError("augment_pair: tensors differ in shape");
    if (std::min(a.height(), a.width()) < config.target_size)
        throw ConfigError("augment: target_size " + std::to_string(config.target_size) +
                          " exceeds source side " +
                          std::to_string(std::min(a.height(), a.width())));
    TransformSample s = sample_transform(a.height(), a.width(), config, rng);
    return {apply_transform(a, s, config.target_size), apply_transform(b, s, config.target_size)};
}

}  // namespace growthcast
