#include "growthcast/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace growthcast {

namespace {

double ground_distance(const ImageRecord& a, const ImageRecord& b) {
    double de = a.easting_m - b.easting_m;
    double dn = a.northing_m - b.northing_m;
    return std::hypot(de, dn);
}

}  // namespace

PairManifest build_pairs(const std::vector<ImageRecord>& records, const PairingConfig& config,
                         std::vector<std::string>* warnings) {
    if (config.distance_threshold_m <= 0) throw ConfigError("distance threshold must be > 0");
    if (config.horizon < 1) throw ConfigError("horizon must be >= 1");

    for (size_t i = 0; i < records.size(); ++i)
        validate_record(records[i], "record " + std::to_string(i));

    PairManifest manifest;
    manifest.horizon = config.horizon;
    manifest.distance_threshold_m = config.distance_threshold_m;

    std::set<int> stages;
    for (const auto& r : records) stages.insert(r.stage);
    if (stages.size() < 2) {
        if (warnings)
            warnings->push_back("pairing: records span fewer than two stages, no pairs possible");
        return manifest;
    }

    // Bucket by stage; sort buckets by image_path so the nearest-candidate
    // scan is independent of input order.
    std::map<int, std::vector<const ImageRecord*>> by_stage;
    for (const auto& r : records) by_stage[r.stage].push_back(&r);
    for (auto& [stage, bucket] : by_stage)
        std::sort(bucket.begin(), bucket.end(),
                  [](const ImageRecord* a, const ImageRecord* b) {
                      return a->image_path < b->image_path;
                  });

    for (const auto& [stage, inputs] : by_stage) {
        auto it = by_stage.find(stage + config.horizon);
        if (it == by_stage.end()) continue;
        const auto& candidates = it->second;
        for (const ImageRecord* a : inputs) {
            const ImageRecord* best = nullptr;
            double best_dist = 0;
            for (const ImageRecord* b : candidates) {
                double d = ground_distance(*a, *b);
                if (d > config.distance_threshold_m) continue;
                // Candidates arrive path-sorted, so strict < keeps the
                // lexicographically smaller path on ties.
                if (!best || d < best_dist) {
                    best = b;
                    best_dist = d;
                }
            }
            if (best) {
                ImagePair p;
                p.input = *a;
                p.reference = *best;
                p.horizon = config.horizon;
                manifest.pairs.push_back(std::move(p));
            }
        }
    }

    std::sort(manifest.pairs.begin(), manifest.pairs.end(),
              [](const ImagePair& a, const ImagePair& b) {
                  if (a.input.stage != b.input.stage) return a.input.stage < b.input.stage;
                  return a.input.image_path < b.input.image_path;
              });
    validate_manifest(manifest);
    return manifest;
}

PairManifest clean_pairs(const PairManifest& manifest,
                         const std::unordered_map<std::string, bool>& visibility,
                         const PairingConfig& config) {
    auto visible = [&](const std::string& path) {
        auto it = visibility.find(path);
        if (it == visibility.end())
            throw DataError("clean_pairs: no visibility entry for image '" + path + "'");
        return it->second;
    };

    PairManifest out;
    out.horizon = manifest.horizon;
    out.distance_threshold_m = manifest.distance_threshold_m;
    out.stage_unit = manifest.stage_unit;
    for (const auto& p : manifest.pairs) {
        bool vis_in = visible(p.input.image_path);
        bool vis_ref = visible(p.reference.image_path);
        if (config.drop_appearing && vis_ref && !vis_in) continue;
        if (config.drop_disappearing && vis_in && !vis_ref) continue;
        out.pairs.push_back(p);
    }
    return out;
}

}  // namespace growthcast
