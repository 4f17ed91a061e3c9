#pragma once

#include <filesystem>
#include <set>

#include "growthcast/rng.hpp"
#include "growthcast/tensor.hpp"

namespace growthcast {

struct AugmentConfig {
    int target_size = 256;
    bool random_crop = false;
    bool flip_horizontal = false;
    bool flip_vertical = false;
    std::set<int> rotations_deg = {0};  // subset of {0, 180}
    double crop_scale_min = 0.8;        // crop side as a fraction of the source side

    void validate() const;
};

// Decodes an 8-bit RGB raster, pads the short axis with equal black borders
// until the image is square, and maps values linearly from [0,255] to [-1,1].
// An odd padding difference puts the extra row at the bottom (column at the
// right).
Tensor load_and_pad(const std::filesystem::path& path);

// Same padding applied to an already-decoded tensor.
Tensor pad_to_square(const Tensor& t);

// Bilinear resample (half-pixel centers).
Tensor resize_bilinear(const Tensor& t, int out_height, int out_width);

// One sampled transform, applied identically to both pair members.
struct TransformSample {
    int crop_x = 0, crop_y = 0, crop_side = 0;  // crop_side == 0 means no crop
    bool flip_h = false, flip_v = false;
    int rotation_deg = 0;
};

TransformSample sample_transform(int source_height, int source_width, const AugmentConfig& config,
                                 Rng& rng);

Tensor apply_transform(const Tensor& t, const TransformSample& s, int target_size);

// Draws a single transform and applies it to both tensors, which must share a
// shape. Output is target_size x target_size. Throws ConfigError when the
// source is smaller than the target.
std::pair<Tensor, Tensor> augment_pair(const Tensor& a, const Tensor& b,
                                       const AugmentConfig& config, Rng& rng);

}  // namespace growthcast
