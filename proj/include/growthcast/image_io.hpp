#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "growthcast/tensor.hpp"

namespace growthcast {

// 8-bit RGB raster, row-major interleaved.
struct RasterImage {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> rgb;  // height * width * 3
};

// Decodes a PNG/JPEG file. Throws DataError when the file is missing or
// undecodable, and when the raster is not 8-bit 3-channel.
RasterImage read_raster(const std::filesystem::path& path);

void write_raster(const RasterImage& image, const std::filesystem::path& path);

// Single-channel 8-bit PNG (0/255), used for ground-truth masks.
std::vector<std::uint8_t> read_gray(const std::filesystem::path& path, int* height, int* width);
void write_gray(const std::vector<std::uint8_t>& gray, int height, int width,
                const std::filesystem::path& path);

// [0,255] byte -> [-1,1] value: 2*v/255 - 1.
Tensor raster_to_tensor(const RasterImage& image);

// Inverse map with rounding half away from zero; clamps to [0, 255].
RasterImage tensor_to_raster(const Tensor& t);

void write_image_tensor(const Tensor& t, const std::filesystem::path& path);

}  // namespace growthcast
