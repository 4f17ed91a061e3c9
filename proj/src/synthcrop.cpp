#include "growthcast/synthcrop.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "growthcast/csv.hpp"
#include "growthcast/image_io.hpp"
#include "growthcast/num.hpp"
#include "growthcast/rng.hpp"

namespace growthcast::synthcrop {

void SynthConfig::validate() const {
    if (n_plants < 0) throw ConfigError("synth: n_plants must be >= 0");
    if (stages < 1) throw ConfigError("synth: stages must be >= 1");
    if (image_size < 16) throw ConfigError("synth: image_size must be >= 16");
    if (base_area <= 0 || growth_rate <= 0)
        throw ConfigError("synth: growth law parameters must be positive");
    if (!(max_area_fraction > 0 && max_area_fraction <= 0.9))
        throw ConfigError("synth: max_area_fraction must be in (0, 0.9]");
    if (!(test_fraction >= 0 && test_fraction < 1))
        throw ConfigError("synth: test_fraction must be in [0, 1)");
    if (!(harvest_fraction >= 0 && harvest_fraction < 1))
        throw ConfigError("synth: harvest_fraction must be in [0, 1)");
    if (jitter_m < 0 || resolution_m_per_px <= 0)
        throw ConfigError("synth: jitter/resolution must be positive");
}

double SynthConfig::treatment_multiplier(Treatment t) const {
    switch (t) {
        case Treatment::IpFp: return 1.0;
        case Treatment::IpFm: return 0.8;
        case Treatment::ImFp: return 0.65;
        case Treatment::ImFm: return 0.5;
        case Treatment::None: break;
    }
    throw ConfigError("synth: treatment 'none' has no growth multiplier");
}

double SynthConfig::target_area(int stage, Treatment t) const {
    double area = treatment_multiplier(t) * base_area * std::exp(growth_rate * stage);
    return std::min(area, max_area_fraction * image_size * image_size);
}

namespace {

struct Leaf {
    double angle;       // radians from plant center
    double length;      // relative to the rosette scale
    double width;       // minor/major axis ratio
    double reach;       // leaf-center distance along angle, relative
    double lightness;   // per-leaf green variation
};

std::vector<Leaf> make_leaves(std::uint64_t identity_seed, int count) {
    Rng rng(derive_seed(identity_seed, {0x1eafu}));
    std::vector<Leaf> leaves(count);
    for (int i = 0; i < count; ++i) {
        Leaf& l = leaves[i];
        l.angle = (2.0 * M_PI * i) / count + rng.uniform(-0.25, 0.25);
        l.length = rng.uniform(0.75, 1.25);
        l.width = rng.uniform(0.34, 0.5);
        l.reach = rng.uniform(0.5, 0.62);
        l.lightness = rng.uniform(0.85, 1.2);
    }
    return leaves;
}

// Rasterizes one rosette at the given scale; returns pixels set.
long draw_rosette(const RosetteSpec& spec, const std::vector<Leaf>& leaves, double scale,
                  int size, std::vector<std::uint8_t>* mask, std::vector<int>* leaf_index) {
    long count = 0;
    for (std::size_t li = 0; li < leaves.size(); ++li) {
        const Leaf& l = leaves[li];
        double a = std::max(0.6, scale * l.length);       // semi-major
        double b = std::max(0.45, a * l.width);           // semi-minor
        double cx = spec.center_x_px + std::cos(l.angle) * scale * l.length * 2.0 * l.reach;
        double cy = spec.center_y_px + std::sin(l.angle) * scale * l.length * 2.0 * l.reach;
        double ca = std::cos(l.angle), sa = std::sin(l.angle);
        int x0 = std::max(0, int(std::floor(cx - a)));
        int x1 = std::min(size - 1, int(std::ceil(cx + a)));
        int y0 = std::max(0, int(std::floor(cy - a)));
        int y1 = std::min(size - 1, int(std::ceil(cy + a)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                double dx = x - cx, dy = y - cy;
                double u = dx * ca + dy * sa;
                double v = -dx * sa + dy * ca;
                if ((u * u) / (a * a) + (v * v) / (b * b) > 1.0) continue;
                std::size_t idx = std::size_t(y) * size + x;
                if (!(*mask)[idx]) {
                    (*mask)[idx] = 1;
                    ++count;
                }
                if (leaf_index) (*leaf_index)[idx] = int(li);
            }
    }
    return count;
}

// Low-frequency value noise over a coarse grid, bilinearly interpolated.
std::vector<double> value_noise(int size, int cells, Rng& rng) {
    std::vector<double> grid((cells + 1) * (cells + 1));
    for (auto& v : grid) v = rng.uniform(-1.0, 1.0);
    std::vector<double> out(std::size_t(size) * size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            double gy = double(y) / size * cells;
            double gx = double(x) / size * cells;
            int iy = int(gy), ix = int(gx);
            double fy = gy - iy, fx = gx - ix;
            double v00 = grid[iy * (cells + 1) + ix];
            double v01 = grid[iy * (cells + 1) + ix + 1];
            double v10 = grid[(iy + 1) * (cells + 1) + ix];
            double v11 = grid[(iy + 1) * (cells + 1) + ix + 1];
            out[std::size_t(y) * size + x] =
                v00 * (1 - fy) * (1 - fx) + v01 * (1 - fy) * fx + v10 * fy * (1 - fx) +
                v11 * fy * fx;
        }
    return out;
}

}  // namespace

SceneResult render_scene(int image_size, const std::vector<RosetteSpec>& plants,
                         std::uint64_t scene_seed) {
    const int S = image_size;
    SceneResult result;
    result.image = Tensor(3, S, S);
    result.union_mask.assign(std::size_t(S) * S, 0);

    // Background: brown with correlated luminance noise so the excess-green
    // index stays near zero everywhere off-plant.
    Rng bg_rng(derive_seed(scene_seed, {0xb6u}));
    auto coarse = value_noise(S, 8, bg_rng);
    const double bg[3] = {0.42, 0.33, 0.24};
    for (int y = 0; y < S; ++y)
        for (int x = 0; x < S; ++x) {
            std::size_t i = std::size_t(y) * S + x;
            double lum = 0.06 * coarse[i] + 0.015 * bg_rng.uniform(-1.0, 1.0);
            for (int c = 0; c < 3; ++c) {
                double v = std::clamp(bg[c] + lum + 0.008 * bg_rng.uniform(-1.0, 1.0), 0.0, 1.0);
                result.image.channel(c)[i] = 2.0 * v - 1.0;
            }
        }

    for (const auto& spec : plants) {
        auto leaves = make_leaves(spec.identity_seed, spec.leaf_count);
        std::vector<std::uint8_t> mask(std::size_t(S) * S, 0);
        std::vector<int> leaf_index(std::size_t(S) * S, -1);

        // The union area of the leaf ellipses has no closed form; bisect the
        // rosette scale against the rendered (in-frame) pixel count.
        double lo = 0.3, hi = double(S);
        for (int iter = 0; iter < 42; ++iter) {
            double mid = (lo + hi) / 2.0;
            std::fill(mask.begin(), mask.end(), 0);
            long area = draw_rosette(spec, leaves, mid, S, &mask, nullptr);
            if (double(area) < spec.target_area_px)
                lo = mid;
            else
                hi = mid;
        }
        std::fill(mask.begin(), mask.end(), 0);
        std::fill(leaf_index.begin(), leaf_index.end(), -1);
        draw_rosette(spec, leaves, (lo + hi) / 2.0, S, &mask, &leaf_index);

        Rng shade_rng(derive_seed(spec.identity_seed, {0x5adu, scene_seed}));
        const double fg[3] = {0.16, 0.46, 0.14};
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (!mask[i]) continue;
            const Leaf& l = leaves[std::size_t(leaf_index[i])];
            double lum = 0.03 * shade_rng.uniform(-1.0, 1.0);
            for (int c = 0; c < 3; ++c) {
                double v = std::clamp(fg[c] * l.lightness + lum, 0.0, 1.0);
                result.image.channel(c)[i] = 2.0 * v - 1.0;
            }
            result.union_mask[i] = 1;
        }
        result.plant_masks.push_back(std::move(mask));
    }

    // Painter order: a later plant owns overlapped pixels.
    for (std::size_t p = 0; p + 1 < result.plant_masks.size(); ++p)
        for (std::size_t q = p + 1; q < result.plant_masks.size(); ++q)
            for (std::size_t i = 0; i < result.plant_masks[p].size(); ++i)
                if (result.plant_masks[q][i]) result.plant_masks[p][i] = 0;
    return result;
}

SynthSummary generate_dataset(const SynthConfig& config, const std::filesystem::path& out_dir) {
    config.validate();
    std::filesystem::create_directories(out_dir / "images");

    SynthSummary summary;
    const int S = config.image_size;
    const double res = config.resolution_m_per_px;

    const int per_block = config.n_plants / 4 + (config.n_plants % 4 ? 1 : 0);
    const int plants_per_row = 10;

    // Per-plant layout, identity, jitter and harvest draws.
    struct Plant {
        std::string id;
        Treatment treatment;
        Split split;
        double east, north;
        std::uint64_t identity;
        int harvest_stage;  // stages (== config.stages) means never
        std::vector<std::pair<double, double>> jitter;
    };
    std::vector<Plant> plants;
    for (int p = 0; p < config.n_plants; ++p) {
        Plant plant;
        char id[16];
        std::snprintf(id, sizeof(id), "p%03d", p);
        plant.id = id;
        int block = per_block > 0 ? p / per_block : 0;
        plant.treatment = kAllTreatments[std::min(block, 3)];
        int in_block = per_block > 0 ? p % per_block : 0;
        // rows run along northing; blocks sit side by side in easting
        plant.east = block * (plants_per_row + 2) * 0.5 + (in_block % plants_per_row) * 0.5;
        plant.north = (in_block / plants_per_row) * 0.35;
        int test_count = int(std::lround(config.test_fraction * per_block));
        plant.split = (per_block - in_block) <= test_count ? Split::Test : Split::Train;
        plant.identity = derive_seed(config.seed, {0x91a0u, std::uint64_t(p)});

        Rng harvest_rng(derive_seed(config.seed, {0x4a5u, std::uint64_t(p)}));
        plant.harvest_stage = config.stages;
        if (config.stages >= 3 && harvest_rng.bernoulli(config.harvest_fraction))
            plant.harvest_stage = 2 + harvest_rng.uniform_int(config.stages - 2);

        Rng jitter_rng(derive_seed(config.seed, {0x717u, std::uint64_t(p)}));
        for (int t = 0; t < config.stages; ++t)
            plant.jitter.emplace_back(jitter_rng.normal(0.0, config.jitter_m),
                                      jitter_rng.normal(0.0, config.jitter_m));
        if (plant.harvest_stage < config.stages) summary.harvest_log[plant.id] = plant.harvest_stage;
        plants.push_back(std::move(plant));
    }

    for (const auto& plant : plants) {
        for (int t = 0; t < config.stages; ++t) {
            char name[32];
            std::snprintf(name, sizeof(name), "%s_s%d.png", plant.id.c_str(), t);
            std::filesystem::path img_path = out_dir / "images" / name;

            bool present = t < plant.harvest_stage;
            std::vector<RosetteSpec> specs;
            if (present) {
                RosetteSpec spec;
                // The image center sits at plant position + jitter, so the
                // plant lands off-center by the negated jitter.
                spec.center_x_px = S / 2.0 - plant.jitter[t].first / res;
                spec.center_y_px = S / 2.0 - plant.jitter[t].second / res;
                spec.target_area_px = config.target_area(t, plant.treatment);
                spec.leaf_count = 5 + 2 * t;
                spec.identity_seed = plant.identity;
                specs.push_back(spec);
            }
            std::uint64_t scene_seed =
                derive_seed(config.seed, {0x5ce4eu, std::uint64_t(&plant - plants.data()),
                                          std::uint64_t(t)});
            SceneResult scene = render_scene(S, specs, scene_seed);
            write_image_tensor(scene.image, img_path);
            std::vector<std::uint8_t> mask_png(scene.union_mask.size());
            for (std::size_t i = 0; i < mask_png.size(); ++i)
                mask_png[i] = scene.union_mask[i] ? 255 : 0;
            write_gray(mask_png, S, S, img_path.string() + ".mask.png");
            ++summary.images_written;

            ImageRecord record;
            record.image_path = img_path.string();
            record.plot_id = plant.id;
            record.stage = t;
            record.easting_m = plant.east + plant.jitter[t].first;
            record.northing_m = plant.north + plant.jitter[t].second;
            record.treatment = plant.treatment;
            record.split = plant.split;
            summary.records.push_back(record);

            GroundTruthRow gt;
            gt.image_path = record.image_path;
            gt.plant_id = plant.id;
            gt.stage = t;
            gt.treatment = plant.treatment;
            gt.true_area_px = long(std::count(scene.union_mask.begin(), scene.union_mask.end(),
                                              std::uint8_t(1)));
            gt.visible = gt.true_area_px >= config.visible_min_area;
            summary.ground_truth.push_back(gt);
        }
    }

    // Alignment oracle: within one plant the image centers differ only by
    // jitter; neighbors sit far outside the 2 cm rule.
    for (int h = 1; h < config.stages; ++h) {
        long count = 0;
        for (const auto& plant : plants)
            for (int t = 0; t + h < config.stages; ++t) {
                double de = plant.jitter[t].first - plant.jitter[t + h].first;
                double dn = plant.jitter[t].second - plant.jitter[t + h].second;
                if (std::hypot(de, dn) <= 0.02) ++count;
            }
        summary.expected_pairs_at_horizon[h] = count;
    }

    save_records_csv(summary.records, out_dir / "records.csv");

    csv::Table gt_table;
    gt_table.header = {"image_path", "plant_id", "stage", "treatment", "true_area_px", "visible"};
    for (const auto& g : summary.ground_truth)
        gt_table.rows.push_back({g.image_path, g.plant_id, std::to_string(g.stage),
                                 to_string(g.treatment), std::to_string(g.true_area_px),
                                 g.visible ? "1" : "0"});
    csv::write_file(out_dir / "ground_truth.csv", gt_table);

    csv::Table harvest_table;
    harvest_table.header = {"plant_id", "harvest_stage"};
    for (const auto& [id, stage] : summary.harvest_log)
        harvest_table.rows.push_back({id, std::to_string(stage)});
    csv::write_file(out_dir / "harvest_log.csv", harvest_table);
    return summary;
}

std::vector<GroundTruthRow> load_ground_truth_csv(const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    std::vector<GroundTruthRow> out;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        std::string where = path.string() + " row " + std::to_string(i + 2);
        GroundTruthRow g;
        g.image_path = row[0];
        g.plant_id = row[1];
        g.stage = int(parse_long(row[2], where));
        g.treatment = treatment_from_string(row[3]);
        g.true_area_px = parse_long(row[4], where);
        g.visible = row[5] == "1";
        out.push_back(std::move(g));
    }
    return out;
}

std::map<std::string, int> load_harvest_log_csv(const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    std::map<std::string, int> out;
    for (size_t i = 0; i < table.rows.size(); ++i)
        out[table.rows[i][0]] =
            int(parse_long(table.rows[i][1], path.string() + " row " + std::to_string(i + 2)));
    return out;
}

}  // namespace growthcast::synthcrop
