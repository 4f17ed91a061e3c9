#include "growthcast/traits.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "json.hpp"

#include "growthcast/csv.hpp"
#include "growthcast/num.hpp"

namespace growthcast {

long PlantInstance::area() const {
    return std::accumulate(mask.begin(), mask.end(), 0L,
                           [](long acc, std::uint8_t v) { return acc + (v ? 1 : 0); });
}

void validate_instance(const PlantInstance& inst, const std::string& where) {
    if (inst.mask.size() != std::size_t(inst.image_height) * inst.image_width)
        throw DataError(where + ": mask size does not match image dimensions");
    int xmin = inst.image_width, ymin = inst.image_height, xmax = -1, ymax = -1;
    for (int y = 0; y < inst.image_height; ++y)
        for (int x = 0; x < inst.image_width; ++x)
            if (inst.mask[std::size_t(y) * inst.image_width + x]) {
                xmin = std::min(xmin, x);
                ymin = std::min(ymin, y);
                xmax = std::max(xmax, x);
                ymax = std::max(ymax, y);
            }
    if (xmax < 0) throw DataError(where + ": empty mask");
    if (inst.x_min != xmin || inst.y_min != ymin || inst.x_max != xmax + 1 ||
        inst.y_max != ymax + 1)
        throw DataError(where + ": bounding box is not the tight box of the mask");
    if (!(inst.x_min < inst.x_max && inst.y_min < inst.y_max))
        throw DataError(where + ": degenerate bounding box");
    if (!(inst.score >= 0.0 && inst.score <= 1.0))
        throw DataError(where + ": score outside [0, 1]");
}

std::vector<double> excess_green(const Tensor& image) {
    validate_image_tensor(image, "segment input");
    std::size_t n = std::size_t(image.height()) * image.width();
    std::vector<double> exg(n);
    const double* r = image.channel(0);
    const double* g = image.channel(1);
    const double* b = image.channel(2);
    for (std::size_t i = 0; i < n; ++i) {
        // channels mapped from [-1,1] back to [0,1]
        double rv = (r[i] + 1.0) / 2.0, gv = (g[i] + 1.0) / 2.0, bv = (b[i] + 1.0) / 2.0;
        exg[i] = 2.0 * gv - rv - bv;
    }
    return exg;
}

double otsu_threshold(const std::vector<double>& values, double fixed_fallback,
                      double variance_ratio_floor, bool* used_fallback) {
    constexpr int kBins = 256;
    auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double mn = *mn_it, mx = *mx_it;
    if (used_fallback) *used_fallback = false;
    if (mx - mn < 1e-12) {
        if (used_fallback) *used_fallback = true;
        return fixed_fallback;
    }
    std::array<long, kBins> hist{};
    const double scale = kBins / (mx - mn);
    for (double v : values) {
        int bin = std::min(kBins - 1, int((v - mn) * scale));
        ++hist[bin];
    }
    const double total = double(values.size());
    double sum_all = 0.0;
    for (int i = 0; i < kBins; ++i) sum_all += i * double(hist[i]);

    // The between-class variance is flat across an empty gap between modes;
    // track the plateau and split at its midpoint.
    double best_between = -1.0;
    int plateau_lo = 0, plateau_hi = 0;
    double best_separation = 0.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < kBins - 1; ++t) {
        w0 += double(hist[t]);
        sum0 += t * double(hist[t]);
        double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        double mu0 = sum0 / w0, mu1 = (sum_all - sum0) / w1;
        double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best_between * (1.0 + 1e-12)) {
            best_between = between;
            plateau_lo = plateau_hi = t;
            best_separation = (mu1 - mu0) / scale;  // back to index units
        } else if (between >= best_between * (1.0 - 1e-12)) {
            plateau_hi = t;
        }
    }
    int best_bin = (plateau_lo + plateau_hi) / 2;
    // Unimodality check. A histogram normalized to its own range always looks
    // spread out, so the discriminating quantity is the squared class-mean
    // separation at the optimum, measured on the index scale itself: soil
    // noise separates by a few hundredths, soil-vs-canopy by ~0.5.
    if (best_separation * best_separation < variance_ratio_floor) {
        if (used_fallback) *used_fallback = true;
        return fixed_fallback;
    }
    return mn + (best_bin + 1) / scale;
}

namespace {

std::vector<std::uint8_t> morph(const std::vector<std::uint8_t>& in, int h, int w, bool erode) {
    std::vector<std::uint8_t> out(in.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            std::uint8_t v = erode ? 1 : 0;
            for (int dy = -1; dy <= 1 && (erode ? v : !v); ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int yy = y + dy, xx = x + dx;
                    // outside the frame counts as background
                    std::uint8_t nb = (yy < 0 || yy >= h || xx < 0 || xx >= w)
                                          ? 0
                                          : in[std::size_t(yy) * w + xx];
                    if (erode && !nb) v = 0;
                    if (!erode && nb) v = 1;
                }
            out[std::size_t(y) * w + x] = v;
        }
    return out;
}

std::vector<std::uint8_t> morph_open_close(std::vector<std::uint8_t> m, int h, int w) {
    m = morph(m, h, w, true);   // open = erode then dilate
    m = morph(m, h, w, false);
    m = morph(m, h, w, false);  // close = dilate then erode
    m = morph(m, h, w, true);
    return m;
}

PlantInstance make_instance(int h, int w, std::vector<std::uint8_t> mask, double score) {
    PlantInstance inst;
    inst.image_height = h;
    inst.image_width = w;
    inst.mask = std::move(mask);
    inst.score = score;
    int xmin = w, ymin = h, xmax = -1, ymax = -1;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (inst.mask[std::size_t(y) * w + x]) {
                xmin = std::min(xmin, x);
                ymin = std::min(ymin, y);
                xmax = std::max(xmax, x);
                ymax = std::max(ymax, y);
            }
    inst.x_min = xmin;
    inst.y_min = ymin;
    inst.x_max = xmax + 1;
    inst.y_max = ymax + 1;
    return inst;
}

std::vector<PlantInstance> connected_components(const std::vector<std::uint8_t>& fg, int h, int w,
                                                long min_area) {
    std::vector<int> label(fg.size(), -1);
    std::vector<PlantInstance> out;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < fg.size(); ++start) {
        if (!fg[start] || label[start] >= 0) continue;
        // flood fill, 8-connected
        std::vector<std::uint8_t> mask(fg.size(), 0);
        stack.assign(1, start);
        label[start] = 0;
        mask[start] = 1;
        long count = 0;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            ++count;
            int y = int(i / w), x = int(i % w);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int yy = y + dy, xx = x + dx;
                    if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
                    std::size_t j = std::size_t(yy) * w + xx;
                    if (fg[j] && label[j] < 0) {
                        label[j] = 0;
                        mask[j] = 1;
                        stack.push_back(j);
                    }
                }
        }
        if (count >= min_area) out.push_back(make_instance(h, w, std::move(mask), 1.0));
    }
    return out;
}

std::string run_external_command(const std::string& command) {
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) throw BackendError("cannot launch segmentation backend: " + command);
    std::string output;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, n);
    int status = pclose(pipe);
    if (status != 0)
        throw BackendError("segmentation backend exited with status " + std::to_string(status) +
                           ": " + command);
    return output;
}

}  // namespace

std::vector<PlantInstance> segment(const Tensor& image, const SegmenterConfig& config) {
    if (config.backend == SegmenterBackend::External) {
        if (config.external_command.empty())
            throw ConfigError("segment: external backend needs a command");
        std::string cmd = config.external_command + " " + config.image_path.string();
        std::string text = run_external_command(cmd);
        auto instances = parse_instances_json(text, image.height(), image.width());
        std::vector<PlantInstance> kept;
        for (auto& inst : instances)
            if (inst.area() >= config.min_area) kept.push_back(std::move(inst));
        return kept;
    }

    auto exg = excess_green(image);
    bool fallback = false;
    double thr = otsu_threshold(exg, config.fixed_threshold, config.variance_ratio_floor,
                                &fallback);
    std::vector<std::uint8_t> fg(exg.size());
    for (std::size_t i = 0; i < exg.size(); ++i) fg[i] = exg[i] > thr ? 1 : 0;
    fg = morph_open_close(std::move(fg), image.height(), image.width());
    auto instances = connected_components(fg, image.height(), image.width(), config.min_area);
    std::sort(instances.begin(), instances.end(), [](const auto& a, const auto& b) {
        if (a.y_min != b.y_min) return a.y_min < b.y_min;
        if (a.x_min != b.x_min) return a.x_min < b.x_min;
        return a.area() < b.area();
    });
    return instances;
}

std::vector<PlantInstance> parse_instances_json(const std::string& text, int image_height,
                                                int image_width) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("invalid instance JSON: ") + e.what());
    }
    if (!j.is_array()) throw BackendError("instance JSON must be an array");
    std::vector<PlantInstance> out;
    for (std::size_t idx = 0; idx < j.size(); ++idx) {
        const auto& item = j[idx];
        std::string where = "instance " + std::to_string(idx);
        if (!item.contains("bbox") || !item.contains("score") || !item.contains("mask_rle"))
            throw BackendError(where + ": needs bbox, score, mask_rle");
        PlantInstance inst;
        inst.image_height = image_height;
        inst.image_width = image_width;
        inst.mask.assign(std::size_t(image_height) * image_width, 0);
        inst.score = item.at("score").get<double>();

        // row-major alternating run lengths, starting with a 0-run
        std::size_t pos = 0;
        std::uint8_t value = 0;
        for (const auto& run : item.at("mask_rle")) {
            long len = run.get<long>();
            if (len < 0) throw BackendError(where + ": negative run length");
            if (pos + std::size_t(len) > inst.mask.size())
                throw BackendError(where + ": RLE runs exceed image size");
            if (value) std::fill_n(inst.mask.begin() + long(pos), len, std::uint8_t(1));
            pos += std::size_t(len);
            value ^= 1;
        }
        if (pos != inst.mask.size())
            throw BackendError(where + ": RLE runs cover " + std::to_string(pos) + " of " +
                               std::to_string(inst.mask.size()) + " pixels");

        auto bbox = item.at("bbox").get<std::vector<int>>();
        if (bbox.size() != 4) throw BackendError(where + ": bbox must be [x0,y0,x1,y1]");
        PlantInstance tight = make_instance(image_height, image_width, inst.mask, inst.score);
        if (tight.x_max < 0 || tight.area() == 0)
            throw BackendError(where + ": empty mask");
        // Trust the mask; the tight box supersedes a sloppy reported bbox.
        inst.x_min = tight.x_min;
        inst.y_min = tight.y_min;
        inst.x_max = tight.x_max;
        inst.y_max = tight.y_max;
        if (!(inst.score >= 0.0 && inst.score <= 1.0))
            throw BackendError(where + ": score outside [0, 1]");
        out.push_back(std::move(inst));
    }
    return out;
}

std::string instances_to_json(const std::vector<PlantInstance>& instances) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& inst : instances) {
        nlohmann::ordered_json item;
        item["bbox"] = {inst.x_min, inst.y_min, inst.x_max, inst.y_max};
        item["score"] = inst.score;
        nlohmann::ordered_json rle = nlohmann::ordered_json::array();
        std::size_t i = 0;
        std::uint8_t value = 0;
        while (i < inst.mask.size()) {
            std::size_t run = 0;
            while (i + run < inst.mask.size() && (inst.mask[i + run] != 0) == (value != 0)) ++run;
            rle.push_back(run);
            i += run;
            value ^= 1;
        }
        item["mask_rle"] = std::move(rle);
        arr.push_back(std::move(item));
    }
    return arr.dump();
}

std::vector<TraitRecord> extract_traits(const std::vector<PlantInstance>& instances,
                                        const ImageRecord& image_meta) {
    std::vector<TraitRecord> out;
    out.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& inst = instances[i];
        TraitRecord rec;
        rec.projected_leaf_area_px = inst.area();
        rec.center_x = (inst.x_min + inst.x_max) / 2.0;
        rec.center_y = (inst.y_min + inst.y_max) / 2.0;
        rec.width_px = inst.x_max - inst.x_min;
        rec.height_px = inst.y_max - inst.y_min;
        rec.score = inst.score;
        rec.source_image = image_meta.image_path;
        rec.stage = image_meta.stage;
        rec.treatment = image_meta.treatment;
        for (std::size_t j = 0; j < instances.size(); ++j) {
            if (j == i) continue;
            if (instances[j].y_min < inst.y_max && inst.y_min < instances[j].y_max) {
                rec.height_unreliable = true;
                break;
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<TraitRecord> select_center_plants(const std::vector<TraitRecord>& records,
                                              int image_size, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw ConfigError("select_center_plants: fraction must be in (0, 1]");
    const double c = image_size / 2.0;
    const double half = fraction * image_size / 2.0;
    std::vector<TraitRecord> out;
    for (const auto& r : records) {
        if (r.center_x >= c - half && r.center_x <= c + half && r.center_y >= c - half &&
            r.center_y <= c + half)
            out.push_back(r);
    }
    return out;
}

void save_traits_csv(const std::vector<TraitRecord>& records,
                     const std::filesystem::path& path) {
    csv::Table table;
    table.header = {"source_image", "stage",    "treatment", "area_px", "center_x",
                    "center_y",     "width_px", "height_px", "score"};
    for (const auto& r : records)
        table.rows.push_back({r.source_image, std::to_string(r.stage), to_string(r.treatment),
                              std::to_string(r.projected_leaf_area_px), format_double(r.center_x),
                              format_double(r.center_y), std::to_string(r.width_px),
                              std::to_string(r.height_px), format_double(r.score)});
    csv::write_file(path, table);
}

std::vector<TraitRecord> load_traits_csv(const std::filesystem::path& path) {
    csv::Table table = csv::read_file(path);
    const std::vector<std::string> expect = {"source_image", "stage",    "treatment",
                                             "area_px",      "center_x", "center_y",
                                             "width_px",     "height_px", "score"};
    if (table.header != expect)
        throw DataError(path.string() + ": unexpected trait CSV header");
    std::vector<TraitRecord> out;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        std::string where = path.string() + " row " + std::to_string(i + 2);
        TraitRecord r;
        r.source_image = row[0];
        r.stage = int(parse_long(row[1], where));
        r.treatment = treatment_from_string(row[2]);
        r.projected_leaf_area_px = parse_long(row[3], where);
        r.center_x = parse_double(row[4], where);
        r.center_y = parse_double(row[5], where);
        r.width_px = int(parse_long(row[6], where));
        r.height_px = int(parse_long(row[7], where));
        r.score = parse_double(row[8], where);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace growthcast
