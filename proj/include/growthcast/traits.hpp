#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "growthcast/datamodel.hpp"
#include "growthcast/tensor.hpp"

namespace growthcast {

// Per-plant binary mask plus its tight bounding box. The box is half-open:
// [x_min, x_max) x [y_min, y_max), so width == x_max - x_min.
struct PlantInstance {
    int image_height = 0;
    int image_width = 0;
    std::vector<std::uint8_t> mask;  // image-sized, 0/1
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    double score = 1.0;

    long area() const;
};

// Recomputes the tight bbox from the mask and checks the instance invariants.
void validate_instance(const PlantInstance& inst, const std::string& where);

enum class SegmenterBackend { Baseline, External };

struct SegmenterConfig {
    SegmenterBackend backend = SegmenterBackend::Baseline;
    long min_area = 50;
    double fixed_threshold = 0.1;      // fallback when the histogram is unimodal
    double variance_ratio_floor = 0.05;
    // External backend: command invoked as `<command> <image_path>`, expected
    // to print one instance-list JSON array on stdout.
    std::string external_command;
    std::filesystem::path image_path;  // passed to the external command
};

// Baseline: excess-green index (2G - R - B on [0,1] channels) thresholded by
// Otsu, 3x3 morphological open then close, connected components, components
// under min_area dropped. External: delegates to the configured command.
// Instances are sorted by (y_min, x_min, area); no plant is an empty list.
std::vector<PlantInstance> segment(const Tensor& image, const SegmenterConfig& config);

// Pieces of the baseline, exposed for tests.
std::vector<double> excess_green(const Tensor& image);
double otsu_threshold(const std::vector<double>& values, double fixed_fallback,
                      double variance_ratio_floor, bool* used_fallback = nullptr);

// Parses the external instance-list JSON: [{"bbox": [x0,y0,x1,y1], "score": s,
// "mask_rle": [...]}]. RLE is row-major alternating 0/1 run lengths starting
// with a 0-run; runs must sum to height*width.
std::vector<PlantInstance> parse_instances_json(const std::string& text, int image_height,
                                                int image_width);
std::string instances_to_json(const std::vector<PlantInstance>& instances);

struct TraitRecord {
    long projected_leaf_area_px = 0;
    double center_x = 0.0, center_y = 0.0;
    int width_px = 0;   // extent across the plant row (x axis; rows run vertically)
    int height_px = 0;  // extent along the row (y axis)
    bool height_unreliable = false;  // another instance overlaps this one's y interval
    double score = 1.0;
    std::string source_image;
    int stage = 0;
    Treatment treatment = Treatment::None;
};

std::vector<TraitRecord> extract_traits(const std::vector<PlantInstance>& instances,
                                        const ImageRecord& image_meta);

// Keeps records whose center lies inside the centered square window of side
// fraction * image_size (inclusive bounds).
std::vector<TraitRecord> select_center_plants(const std::vector<TraitRecord>& records,
                                              int image_size, double fraction);

// CSV columns: source_image,stage,treatment,area_px,center_x,center_y,width_px,height_px,score
void save_traits_csv(const std::vector<TraitRecord>& records, const std::filesystem::path& path);
std::vector<TraitRecord> load_traits_csv(const std::filesystem::path& path);

}  // namespace growthcast
