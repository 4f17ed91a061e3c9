#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "growthcast/datamodel.hpp"
#include "growthcast/tensor.hpp"

namespace growthcast::synthcrop {

struct SynthConfig {
    int n_plants = 120;
    int stages = 6;
    int image_size = 64;
    // area(t) = multiplier * base_area * exp(growth_rate * t), clipped
    double base_area = 80.0;
    double growth_rate = 0.6;
    double max_area_fraction = 0.45;  // of image_size^2
    double jitter_m = 0.004;          // positional noise of the image center
    double resolution_m_per_px = 0.004;
    double test_fraction = 0.25;      // held-out plants per treatment block
    double harvest_fraction = 0.12;   // plants removed after a sampled stage
    long visible_min_area = 50;       // ground-truth visibility floor
    std::uint64_t seed = 0;

    void validate() const;
    double treatment_multiplier(Treatment t) const;  // i+f+ 1.0 ... i-f- 0.5
    double target_area(int stage, Treatment t) const;
};

// One rosette to draw: overlapping elliptical leaves around a center, leaf
// arrangement fixed by identity_seed so a plant keeps its shape across stages.
struct RosetteSpec {
    double center_x_px = 0.0;
    double center_y_px = 0.0;
    double target_area_px = 0.0;
    int leaf_count = 8;
    std::uint64_t identity_seed = 0;
};

struct SceneResult {
    Tensor image;                                       // 3 x S x S in [-1, 1]
    std::vector<std::uint8_t> union_mask;               // S*S, 0/1
    std::vector<std::vector<std::uint8_t>> plant_masks; // per spec, painter order
};

// Textured brown background with green rosettes; plant size is tuned so each
// rendered (in-frame) area matches its target within rasterization error.
SceneResult render_scene(int image_size, const std::vector<RosetteSpec>& plants,
                         std::uint64_t scene_seed);

struct GroundTruthRow {
    std::string image_path;
    std::string plant_id;
    int stage = 0;
    Treatment treatment = Treatment::None;
    long true_area_px = 0;
    bool visible = false;
};

struct SynthSummary {
    std::vector<ImageRecord> records;
    std::vector<GroundTruthRow> ground_truth;
    std::map<std::string, int> harvest_log;       // plant_id -> first absent stage
    std::map<int, long> expected_pairs_at_horizon;  // alignment-rule oracle, 2 cm
    long images_written = 0;
};

// Emits records.csv, ground_truth.csv, harvest_log.csv, images/<id>_s<t>.png
// and masks images/<id>_s<t>.png.mask.png under out_dir. Deterministic for a
// fixed seed, byte-for-byte.
SynthSummary generate_dataset(const SynthConfig& config, const std::filesystem::path& out_dir);

std::vector<GroundTruthRow> load_ground_truth_csv(const std::filesystem::path& path);
std::map<std::string, int> load_harvest_log_csv(const std::filesystem::path& path);

}  // namespace growthcast::synthcrop
