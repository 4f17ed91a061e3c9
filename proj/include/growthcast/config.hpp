#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "growthcast/common.hpp"

namespace growthcast {

// Flat dotted-key configuration merged from (lowest to highest precedence)
// built-in defaults, the selected profile, a config file, environment
// variables, and command-line flags. Fully resolved before any module runs.
class RunConfig {
public:
    static RunConfig resolve(const std::filesystem::path& config_file,
                             const std::map<std::string, std::string>& flag_overrides);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::set<int> get_int_set(const std::string& key, const std::set<int>& fallback) const;

    // "key=value" lines, key-sorted; the copy written into output directories.
    std::string to_text() const;
    void write_into(const std::filesystem::path& out_dir) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Named experiment bundles: "cauliflower" (256 px, 160 epochs),
// "rosette" (256 px, 40 epochs), "synthetic" (64 px desk-scale defaults).
std::map<std::string, std::string> profile_settings(const std::string& profile);

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);

}  // namespace growthcast
