#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "growthcast/common.hpp"
#include "growthcast/fid.hpp"
#include "growthcast/traits.hpp"

namespace growthcast {

struct PairedObservation {
    double reference_area_px = 0.0;
    double generated_area_px = 0.0;
    int stage = 0;  // reference stage
    Treatment treatment = Treatment::None;
};

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    long n = 0;
};

// Ordinary least squares of generated (y) on reference (x), with intercept.
// R^2 = 1 - SS_res/SS_tot, defined as 0 when y is constant. Throws DataError
// for n < 2 or all-equal x.
RegressionResult fit_regression(const std::vector<PairedObservation>& observations);

struct StageStats {
    int stage = 0;
    Treatment treatment = Treatment::None;
    double mean_area_px = 0.0;
    double std_area_px = 0.0;  // population divisor (n)
    long n = 0;
};

// Mean and population standard deviation of area per (stage[, treatment])
// group, sorted by stage then treatment.
std::vector<StageStats> stage_statistics(const std::vector<TraitRecord>& records,
                                         bool group_by_treatment);

// Scatter annotation in the figure convention, e.g. "y = 0.98x + 12.30, R2 = 0.95".
std::string regression_annotation(const RegressionResult& r);

struct ReportInputs {
    std::map<std::string, RegressionResult> regressions;  // keyed "pooled" or treatment
    std::map<std::string, std::vector<PairedObservation>> scatter_points;
    std::vector<std::string> skipped_groups;  // empty treatment groups
    std::vector<StageStats> reference_stats;
    std::vector<StageStats> generated_stats;
    std::optional<fid::FidTriple> fid;
    std::map<int, long> training_pairs_per_stage;  // reference stage -> count
    double center_fraction = 1.0 / 3.0;
    std::string stage_unit = "week";
};

// Writes summary.json, scatter_<group>.svg (+ data CSV), growth_curves.svg
// (+ data CSV) into out_dir. Byte-deterministic for identical inputs.
void render_report(const ReportInputs& inputs, const std::filesystem::path& out_dir);

}  // namespace growthcast
