#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "growthcast/datamodel.hpp"

namespace growthcast {

struct PairingConfig {
    double distance_threshold_m = 0.02;
    int horizon = 1;
    bool drop_appearing = false;     // plant grows into the frame between stages
    bool drop_disappearing = false;  // plant harvested between stages
};

// Aligns records a, b into a pair when b.stage - a.stage == horizon and the
// planar distance between image centers is <= threshold (inclusive). Each
// input matches at most its nearest in-range reference; ties break on the
// lexicographically smaller reference image_path. Deterministic and
// permutation-invariant in `records`. With fewer than two distinct stages the
// result is empty and a diagnostic is appended to `warnings`.
PairManifest build_pairs(const std::vector<ImageRecord>& records, const PairingConfig& config,
                         std::vector<std::string>* warnings = nullptr);

// Applies the visibility cleaning rules. `visibility` must cover every image
// referenced by the manifest (missing entry -> DataError naming the image).
PairManifest clean_pairs(const PairManifest& manifest,
                         const std::unordered_map<std::string, bool>& visibility,
                         const PairingConfig& config);

}  // namespace growthcast
