#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "growthcast/common.hpp"

namespace growthcast {

// One geo-referenced observation. Coordinates are planar metric
// (easting/northing); raw GNSS conversion happens upstream.
struct ImageRecord {
    std::string image_path;
    std::string plot_id;  // "unknown" is a valid sentinel for images without a plant
    int stage = 0;        // week or day index, unit is dataset metadata
    double easting_m = 0.0;
    double northing_m = 0.0;
    Treatment treatment = Treatment::None;
    Split split = Split::Train;
};

// Throws DataError on an invariant violation; `where` names the record.
void validate_record(const ImageRecord& r, const std::string& where);

struct ImagePair {
    ImageRecord input;      // domain A, early stage
    ImageRecord reference;  // domain B, later stage
    int horizon = 0;        // reference.stage - input.stage
};

void validate_pair(const ImagePair& p, const std::string& where);

struct PairManifest {
    std::vector<ImagePair> pairs;
    int horizon = 0;
    double distance_threshold_m = 0.02;
    std::string stage_unit = "week";  // metadata only, never arithmetic
};

// Checks per-pair invariants plus manifest-level ones: common horizon, no
// duplicate (input, reference) path entry, all-or-nothing use of treatment
// `none` across records.
void validate_manifest(const PairManifest& m);

// Manifest directory layout: `records.csv` (one observation per row) and
// `pairs.jsonl` (one pair per line referencing record paths). `path` may be
// the directory or the pairs.jsonl file itself.
PairManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const PairManifest& manifest, const std::filesystem::path& dir);

// Records CSV alone (used by the pairing and synthetic-data commands).
std::vector<ImageRecord> load_records_csv(const std::filesystem::path& path);
void save_records_csv(const std::vector<ImageRecord>& records, const std::filesystem::path& path);

// Pair counts partitioned by stage transition and treatment.
struct CountTable {
    struct Key {
        int from_stage;
        int to_stage;
        Treatment treatment;
        bool operator<(const Key& o) const {
            if (from_stage != o.from_stage) return from_stage < o.from_stage;
            if (to_stage != o.to_stage) return to_stage < o.to_stage;
            return int(treatment) < int(o.treatment);
        }
    };
    std::map<Key, long> cells;

    long total() const;
    long transition_total(int from_stage, int to_stage) const;
    std::string to_text() const;  // aligned table, one transition per row
};

CountTable manifest_counts(const PairManifest& manifest);

}  // namespace growthcast
