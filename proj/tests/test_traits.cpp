#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "growthcast/rng.hpp"
#include "growthcast/synthcrop.hpp"
#include "growthcast/traits.hpp"
#include "helpers.hpp"

using namespace growthcast;
using test_helpers::TempDir;

namespace {

PlantInstance square_instance(int image_size, int x0, int y0, int side) {
    PlantInstance inst;
    inst.image_height = image_size;
    inst.image_width = image_size;
    inst.mask.assign(std::size_t(image_size) * image_size, 0);
    for (int y = y0; y < y0 + side; ++y)
        for (int x = x0; x < x0 + side; ++x) inst.mask[std::size_t(y) * image_size + x] = 1;
    inst.x_min = x0;
    inst.y_min = y0;
    inst.x_max = x0 + side;
    inst.y_max = y0 + side;
    return inst;
}

Tensor rotate180(const Tensor& t) {
    Tensor out(t.channels(), t.height(), t.width());
    for (int c = 0; c < t.channels(); ++c)
        for (int y = 0; y < t.height(); ++y)
            for (int x = 0; x < t.width(); ++x)
                out.at(c, y, x) = t.at(c, t.height() - 1 - y, t.width() - 1 - x);
    return out;
}

synthcrop::SceneResult rosette_scene(double area, std::uint64_t seed, int size = 64,
                                     double cx = -1, double cy = -1) {
    synthcrop::RosetteSpec spec;
    spec.center_x_px = cx < 0 ? size / 2.0 : cx;
    spec.center_y_px = cy < 0 ? size / 2.0 : cy;
    spec.target_area_px = area;
    spec.leaf_count = 9;
    spec.identity_seed = seed;
    return synthcrop::render_scene(size, {spec}, derive_seed(seed, {1}));
}

}  // namespace

TEST_CASE("baseline segmenter: single rosette area tracks the ground-truth mask") {
    SegmenterConfig cfg;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        auto scene = rosette_scene(700.0, seed);
        long truth = long(std::count(scene.union_mask.begin(), scene.union_mask.end(),
                                     std::uint8_t(1)));
        auto instances = segment(scene.image, cfg);
        REQUIRE(instances.size() == 1);
        CHECK(std::abs(double(instances[0].area()) - double(truth)) <= 0.05 * double(truth));
        CHECK_NOTHROW(validate_instance(instances[0], "rosette"));
    }
}

TEST_CASE("baseline segmenter: all-background image yields an empty list") {
    auto scene = synthcrop::render_scene(64, {}, 77);
    SegmenterConfig cfg;
    CHECK(segment(scene.image, cfg).empty());
}

TEST_CASE("baseline segmenter: two separated plants give disjoint instances") {
    synthcrop::RosetteSpec a, b;
    a.center_x_px = 16;
    a.center_y_px = 16;
    a.target_area_px = 180;
    a.identity_seed = 10;
    a.leaf_count = 8;
    b = a;
    b.center_x_px = 48;
    b.center_y_px = 48;
    b.identity_seed = 11;
    auto scene = synthcrop::render_scene(64, {a, b}, 5);

    SegmenterConfig cfg;
    auto instances = segment(scene.image, cfg);
    REQUIRE(instances.size() == 2);
    for (std::size_t i = 0; i < instances[0].mask.size(); ++i)
        CHECK((instances[0].mask[i] & instances[1].mask[i]) == 0);
}

TEST_CASE("baseline segmenter: deterministic, and areas survive 180-degree rotation") {
    auto scene = rosette_scene(420.0, 99);
    SegmenterConfig cfg;
    auto first = segment(scene.image, cfg);
    auto second = segment(scene.image, cfg);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i) CHECK(first[i].mask == second[i].mask);

    auto rotated = segment(rotate180(scene.image), cfg);
    std::multiset<long> areas_a, areas_b;
    for (const auto& inst : first) areas_a.insert(inst.area());
    for (const auto& inst : rotated) areas_b.insert(inst.area());
    CHECK(areas_a == areas_b);
}

TEST_CASE("otsu threshold falls back on unimodal histograms") {
    std::vector<double> unimodal(1000);
    Rng rng(3);
    for (auto& v : unimodal) v = 0.02 * rng.normal();
    bool used_fallback = false;
    double thr = otsu_threshold(unimodal, 0.1, 0.05, &used_fallback);
    CHECK(used_fallback);
    CHECK(thr == 0.1);

    std::vector<double> bimodal;
    for (int i = 0; i < 500; ++i) bimodal.push_back(0.0 + 0.01 * rng.normal());
    for (int i = 0; i < 500; ++i) bimodal.push_back(0.6 + 0.01 * rng.normal());
    thr = otsu_threshold(bimodal, 0.1, 0.05, &used_fallback);
    CHECK_FALSE(used_fallback);
    CHECK(thr > 0.05);
    CHECK(thr < 0.55);
}

TEST_CASE("extract_traits: geometry of a filled square") {
    auto inst = square_instance(32, 5, 5, 10);
    ImageRecord meta{"img.png", "p1", 4, 0, 0, Treatment::IpFm, Split::Test};
    auto records = extract_traits({inst}, meta);
    REQUIRE(records.size() == 1);
    const auto& r = records[0];
    CHECK(r.projected_leaf_area_px == 100);
    CHECK(r.center_x == 10.0);
    CHECK(r.center_y == 10.0);
    CHECK(r.width_px == 10);
    CHECK(r.height_px == 10);
    CHECK(r.stage == 4);
    CHECK(r.treatment == Treatment::IpFm);
    CHECK(r.source_image == "img.png");
    CHECK_FALSE(r.height_unreliable);

    CHECK(extract_traits({}, meta).empty());
}

TEST_CASE("extract_traits: height flagged when bounding boxes overlap along y") {
    auto a = square_instance(64, 4, 10, 8);
    auto b = square_instance(64, 40, 14, 8);  // y-intervals [10,18) and [14,22) overlap
    auto c = square_instance(64, 20, 40, 8);  // clear of both
    ImageRecord meta{"img.png", "p", 0, 0, 0, Treatment::None, Split::Train};
    auto records = extract_traits({a, b, c}, meta);
    REQUIRE(records.size() == 3);
    CHECK(records[0].height_unreliable);
    CHECK(records[1].height_unreliable);
    CHECK_FALSE(records[2].height_unreliable);
}

TEST_CASE("extract_traits matches an independent mask-walk recomputation") {
    Rng rng(17);
    std::vector<PlantInstance> instances;
    for (int i = 0; i < 20; ++i) {
        int side = 2 + rng.uniform_int(9);
        int x0 = rng.uniform_int(64 - side);
        int y0 = rng.uniform_int(64 - side);
        instances.push_back(square_instance(64, x0, y0, side));
        // poke a hole so area != width*height
        if (side > 3) {
            auto& inst = instances.back();
            inst.mask[std::size_t(y0 + 1) * 64 + x0 + 1] = 0;
        }
    }
    ImageRecord meta{"img.png", "p", 2, 0, 0, Treatment::None, Split::Train};
    auto records = extract_traits(instances, meta);
    REQUIRE(records.size() == instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
        long area = 0;
        int xmin = 64, xmax = -1, ymin = 64, ymax = -1;
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x)
                if (instances[i].mask[std::size_t(y) * 64 + x]) {
                    ++area;
                    xmin = std::min(xmin, x);
                    xmax = std::max(xmax, x);
                    ymin = std::min(ymin, y);
                    ymax = std::max(ymax, y);
                }
        CHECK(records[i].projected_leaf_area_px == area);
        CHECK(records[i].width_px == xmax + 1 - xmin);
        CHECK(records[i].height_px == ymax + 1 - ymin);
        CHECK(records[i].center_x == (xmin + xmax + 1) / 2.0);
        CHECK(records[i].center_y == (ymin + ymax + 1) / 2.0);
    }
}

TEST_CASE("select_center_plants window rule") {
    ImageRecord meta{"img.png", "p", 0, 0, 0, Treatment::None, Split::Train};
    auto mk = [&](double cx, double cy) {
        TraitRecord r;
        r.center_x = cx;
        r.center_y = cy;
        return r;
    };
    // center exactly at the midpoint is kept for any fraction
    for (double frac : {0.01, 0.3333333333333333, 1.0}) {
        auto kept = select_center_plants({mk(32, 32)}, 64, frac);
        CHECK(kept.size() == 1);
    }
    CHECK(select_center_plants({mk(0, 0)}, 64, 1.0 / 3.0).empty());

    // random records against the direct predicate
    Rng rng(5);
    std::vector<TraitRecord> records;
    for (int i = 0; i < 50; ++i) records.push_back(mk(rng.uniform(0, 64), rng.uniform(0, 64)));
    auto kept = select_center_plants(records, 64, 0.5);
    std::size_t oracle = 0;
    for (const auto& r : records)
        if (r.center_x >= 16 && r.center_x <= 48 && r.center_y >= 16 && r.center_y <= 48)
            ++oracle;
    CHECK(kept.size() == oracle);

    CHECK_THROWS_AS(select_center_plants(records, 64, 0.0), ConfigError);
}

TEST_CASE("instance JSON: round trip, RLE discipline, error paths") {
    auto a = square_instance(16, 2, 3, 4);
    a.score = 0.875;
    auto b = square_instance(16, 9, 9, 5);
    std::string json = instances_to_json({a, b});

    auto parsed = parse_instances_json(json, 16, 16);
    REQUIRE(parsed.size() == 2);
    CHECK(parsed[0].mask == a.mask);
    CHECK(parsed[0].score == 0.875);
    CHECK(parsed[0].x_min == 2);
    CHECK(parsed[0].x_max == 6);
    CHECK(parsed[1].mask == b.mask);

    CHECK_THROWS_AS(parse_instances_json("not json", 16, 16), BackendError);
    CHECK_THROWS_AS(parse_instances_json("{}", 16, 16), BackendError);
    // runs that do not cover the image
    CHECK_THROWS_AS(parse_instances_json(
                        R"([{"bbox":[0,0,1,1],"score":1.0,"mask_rle":[4,1]}])", 16, 16),
                    BackendError);
    // runs that overflow it
    CHECK_THROWS_AS(parse_instances_json(
                        R"([{"bbox":[0,0,1,1],"score":1.0,"mask_rle":[300,1]}])", 16, 16),
                    BackendError);
    // empty mask
    CHECK_THROWS_AS(parse_instances_json(
                        R"([{"bbox":[0,0,1,1],"score":1.0,"mask_rle":[256]}])", 16, 16),
                    BackendError);
}

TEST_CASE("external backend: command output drives segmentation") {
    TempDir dir;
    auto inst = square_instance(16, 4, 4, 6);
    {
        std::ofstream out(dir.path / "instances.json");
        out << instances_to_json({inst});
    }
    Tensor image(3, 16, 16);

    SegmenterConfig cfg;
    cfg.backend = SegmenterBackend::External;
    cfg.external_command = "cat";
    cfg.image_path = dir.path / "instances.json";  // the command receives this path
    cfg.min_area = 10;
    auto instances = segment(image, cfg);
    REQUIRE(instances.size() == 1);
    CHECK(instances[0].area() == 36);

    cfg.min_area = 100;  // filtered out
    CHECK(segment(image, cfg).empty());

    cfg.external_command = "false";
    cfg.min_area = 10;
    CHECK_THROWS_AS(segment(image, cfg), BackendError);

    cfg.external_command = "";
    CHECK_THROWS_AS(segment(image, cfg), ConfigError);
}

TEST_CASE("trait CSV round trip") {
    TempDir dir;
    auto inst = square_instance(32, 5, 5, 10);
    ImageRecord meta{"img.png", "p1", 4, 0, 0, Treatment::ImFp, Split::Test};
    auto records = extract_traits({inst}, meta);
    save_traits_csv(records, dir.path / "traits.csv");

    std::ifstream in(dir.path / "traits.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "source_image,stage,treatment,area_px,center_x,center_y,width_px,height_px,score");

    auto loaded = load_traits_csv(dir.path / "traits.csv");
    REQUIRE(loaded.size() == 1);
    CHECK(loaded[0].projected_leaf_area_px == 100);
    CHECK(loaded[0].treatment == Treatment::ImFp);
    CHECK(loaded[0].center_x == 10.0);
}
