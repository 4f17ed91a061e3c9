#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "growthcast/config.hpp"

namespace growthcast::commands {

namespace fs = std::filesystem;

// Each command is the library half of one CLI subcommand: it validates its
// inputs, runs the module pipeline, writes artifacts (plus the resolved
// config copy) under out_dir, and throws growthcast errors on failure.

void cmd_synth(const RunConfig& cfg, const fs::path& out_dir);

// records: observations CSV. Split filter: "train", "test", or "all".
// visibility_csv: optional image_path,visible table; when empty and cleaning
// is enabled, visibility comes from the configured segmentation backend.
void cmd_pair(const RunConfig& cfg, const fs::path& records, const std::string& split,
              const fs::path& visibility_csv, const fs::path& out_dir);

void cmd_train(const RunConfig& cfg, const fs::path& pairs_dir, const fs::path& out_dir);

// Generates one image per manifest pair input, named after the input file.
void cmd_predict(const RunConfig& cfg, const fs::path& model_path, const fs::path& pairs_dir,
                 const fs::path& out_dir);

enum class SegmentRole { Input, Reference, Generated };

// Segments one image per pair and extracts traits. Role picks the image and
// metadata: generated images live in generated_dir under the input's file
// name and carry the reference record's stage and treatment.
void cmd_segment(const RunConfig& cfg, const fs::path& pairs_dir, SegmentRole role,
                 const fs::path& generated_dir, const fs::path& out_dir);

// Each image argument may be a directory of rasters or a pair-manifest
// directory (then the pair reference images are used). Writes fid.json.
void cmd_evaluate(const RunConfig& cfg, const fs::path& generated, const fs::path& reference_test,
                  const fs::path& reference_train, const fs::path& out_dir);

void cmd_report(const RunConfig& cfg, const fs::path& reference_traits,
                const fs::path& generated_traits, const fs::path& pairs_dir,
                const fs::path& fid_json, const fs::path& train_pairs_dir,
                const fs::path& out_dir);

// Non-mask rasters in a directory, path-sorted.
std::vector<fs::path> list_images(const fs::path& dir);

}  // namespace growthcast::commands
