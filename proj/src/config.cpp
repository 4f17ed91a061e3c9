#include "growthcast/config.hpp"

#include <cstdlib>
#include <fstream>

#include "growthcast/num.hpp"

namespace growthcast {

namespace {

std::map<std::string, std::string> builtin_defaults() {
    return {
        {"seed", "0"},
        {"workers", "0"},  // 0 = all cores
        {"stage_unit", "week"},
        {"pair.threshold_m", "0.02"},
        {"pair.horizon", "3"},
        {"pair.drop_appearing", "true"},
        {"pair.drop_disappearing", "true"},
        {"augment.target_size", "256"},
        {"augment.random_crop", "true"},
        {"augment.flip_horizontal", "true"},
        {"augment.flip_vertical", "true"},
        {"augment.rotations", "0,180"},
        {"augment.crop_scale_min", "0.8"},
        {"gen.input_size", "256"},
        {"gen.base_channels", "64"},
        {"gen.depth", "8"},
        {"gen.dropout_rate", "0.5"},
        {"disc.patch_levels", "3"},
        {"disc.base_channels", "64"},
        {"train.lambda_l1", "100"},
        {"train.learning_rate", "1e-4"},
        {"train.batch_size", "1"},
        {"train.epochs", "160"},
        {"train.checkpoint_interval", "0"},
        {"predict.stochastic", "true"},
        {"fid.embedding", "random_projection"},
        {"fid.feature_dim", "2048"},
        {"fid.input_size", "299"},
        {"fid.model_source", ""},
        {"traits.backend", "baseline"},
        {"traits.min_area", "50"},
        {"traits.external_command", ""},
        {"traits.center_fraction", "0.3333333333333333"},
        {"synth.n_plants", "120"},
        {"synth.stages", "6"},
        {"synth.image_size", "64"},
        {"synth.base_area", "80"},
        {"synth.growth_rate", "0.6"},
        {"synth.jitter_m", "0.004"},
        {"synth.test_fraction", "0.25"},
        {"synth.harvest_fraction", "0.12"},
    };
}

}  // namespace

std::map<std::string, std::string> profile_settings(const std::string& profile) {
    if (profile == "cauliflower") {
        return {{"train.epochs", "160"}, {"stage_unit", "week"}};
    }
    if (profile == "rosette") {
        return {{"train.epochs", "40"}, {"stage_unit", "day"}};
    }
    if (profile == "synthetic") {
        // Desk-scale bundle: small images, shallow nets, short schedule.
        return {
            {"stage_unit", "week"},
            {"augment.target_size", "64"},
            {"augment.random_crop", "false"},
            {"gen.input_size", "64"},
            {"gen.base_channels", "16"},
            {"gen.depth", "6"},
            {"disc.base_channels", "16"},
            {"train.epochs", "20"},
            {"train.learning_rate", "2e-4"},
            {"fid.embedding", "random_projection"},
            {"fid.feature_dim", "64"},
            {"fid.input_size", "64"},
        };
    }
    throw ConfigError("unknown profile '" + profile +
                      "' (expected cauliflower, rosette, or synthetic)");
}

std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string trimmed = line;
        trimmed.erase(0, trimmed.find_first_not_of(" \t"));
        if (trimmed.empty() || trimmed[0] == '#') continue;
        auto eq = trimmed.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key=value");
        std::string key = trimmed.substr(0, eq);
        std::string value = trimmed.substr(eq + 1);
        key.erase(key.find_last_not_of(" \t") + 1);
        value.erase(0, value.find_first_not_of(" \t"));
        if (key.empty())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": empty key");
        out[key] = value;
    }
    return out;
}

RunConfig RunConfig::resolve(const std::filesystem::path& config_file,
                             const std::map<std::string, std::string>& flag_overrides) {
    // flags > env > file, with the profile expanded beneath all three.
    std::map<std::string, std::string> merged;
    if (!config_file.empty())
        for (const auto& [k, v] : parse_config_file(config_file)) merged[k] = v;
    if (const char* v = std::getenv("GROWTHCAST_SEED")) merged["seed"] = v;
    if (const char* v = std::getenv("GROWTHCAST_FID_MODEL")) merged["fid.model_source"] = v;
    for (const auto& [k, v] : flag_overrides) merged[k] = v;

    RunConfig cfg;
    cfg.values_ = builtin_defaults();
    auto profile_it = merged.find("profile");
    if (profile_it != merged.end()) {
        cfg.values_["profile"] = profile_it->second;
        for (const auto& [k, v] : profile_settings(profile_it->second)) cfg.values_[k] = v;
    }
    for (const auto& [k, v] : merged) cfg.values_[k] = v;
    return cfg;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string RunConfig::require_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty())
        throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) return fallback;
    try {
        return parse_double(it->second, "config key " + key);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

long RunConfig::get_long(const std::string& key, long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) return fallback;
    try {
        return parse_long(it->second, "config key " + key);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key " + key + ": expected a boolean, got '" + v + "'");
}

std::set<int> RunConfig::get_int_set(const std::string& key, const std::set<int>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) return fallback;
    std::set<int> out;
    std::string v = it->second;
    size_t pos = 0;
    while (pos <= v.size()) {
        size_t comma = v.find(',', pos);
        std::string item = v.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!item.empty()) out.insert(int(parse_long(item, "config key " + key)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

void RunConfig::write_into(const std::filesystem::path& out_dir) const {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir / "run_config.cfg", std::ios::binary);
    if (!os) throw DataError("cannot write " + (out_dir / "run_config.cfg").string());
    os << to_text();
}

}  // namespace growthcast
