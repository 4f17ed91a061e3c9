#include "growthcast/image_io.hpp"

#include <cmath>

#include <opencv2/imgcodecs.hpp>

namespace growthcast {

RasterImage read_raster(const std::filesystem::path& path) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (m.empty()) throw DataError("cannot decode image: " + path.string());
    if (m.depth() != CV_8U) throw DataError("not an 8-bit raster: " + path.string());
    if (m.channels() != 3)
        throw DataError("expected 3-channel RGB, got " + std::to_string(m.channels()) +
                        " channels: " + path.string());
    RasterImage img;
    img.height = m.rows;
    img.width = m.cols;
    img.rgb.resize(std::size_t(m.rows) * m.cols * 3);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < m.cols; ++x) {
            std::size_t o = (std::size_t(y) * m.cols + x) * 3;
            img.rgb[o + 0] = row[x][2];  // OpenCV stores BGR
            img.rgb[o + 1] = row[x][1];
            img.rgb[o + 2] = row[x][0];
        }
    }
    return img;
}

void write_raster(const RasterImage& image, const std::filesystem::path& path) {
    cv::Mat m(image.height, image.width, CV_8UC3);
    for (int y = 0; y < image.height; ++y) {
        auto* row = m.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width; ++x) {
            std::size_t o = (std::size_t(y) * image.width + x) * 3;
            row[x] = cv::Vec3b(image.rgb[o + 2], image.rgb[o + 1], image.rgb[o + 0]);
        }
    }
    if (!cv::imwrite(path.string(), m))
        throw DataError("cannot write image: " + path.string());
}

std::vector<std::uint8_t> read_gray(const std::filesystem::path& path, int* height, int* width) {
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw DataError("cannot decode image: " + path.string());
    *height = m.rows;
    *width = m.cols;
    std::vector<std::uint8_t> out(std::size_t(m.rows) * m.cols);
    for (int y = 0; y < m.rows; ++y)
        for (int x = 0; x < m.cols; ++x) out[std::size_t(y) * m.cols + x] = m.at<std::uint8_t>(y, x);
    return out;
}

void write_gray(const std::vector<std::uint8_t>& gray, int height, int width,
                const std::filesystem::path& path) {
    cv::Mat m(height, width, CV_8UC1);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) m.at<std::uint8_t>(y, x) = gray[std::size_t(y) * width + x];
    if (!cv::imwrite(path.string(), m))
        throw DataError("cannot write image: " + path.string());
}

Tensor raster_to_tensor(const RasterImage& image) {
    Tensor t(3, image.height, image.width);
    for (int c = 0; c < 3; ++c) {
        double* plane = t.channel(c);
        for (int y = 0; y < image.height; ++y)
            for (int x = 0; x < image.width; ++x) {
                std::size_t i = std::size_t(y) * image.width + x;
                plane[i] = 2.0 * image.rgb[i * 3 + c] / 255.0 - 1.0;
            }
    }
    return t;
}

RasterImage tensor_to_raster(const Tensor& t) {
    RasterImage img;
    img.height = t.height();
    img.width = t.width();
    img.rgb.resize(std::size_t(t.height()) * t.width() * 3);
    for (int c = 0; c < 3; ++c) {
        const double* plane = t.channel(c);
        for (std::size_t i = 0; i < std::size_t(t.height()) * t.width(); ++i) {
            double v = (plane[i] + 1.0) / 2.0 * 255.0;
            long b = std::lround(v);  // rounds half away from zero
            if (b < 0) b = 0;
            if (b > 255) b = 255;
            img.rgb[i * 3 + c] = std::uint8_t(b);
        }
    }
    return img;
}

void write_image_tensor(const Tensor& t, const std::filesystem::path& path) {
    write_raster(tensor_to_raster(t), path);
}

}  // namespace growthcast
