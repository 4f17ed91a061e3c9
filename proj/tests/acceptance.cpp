// End-to-end acceptance suite. Runs every criterion in order, prints one
// PASS/FAIL line each, and exits nonzero if any fail. Individual criteria can
// be selected by number on the command line (the shared pipeline artifacts
// are built on demand).

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "growthcast/analytics.hpp"
#include "growthcast/cgan.hpp"
#include "growthcast/commands.hpp"
#include "growthcast/fid.hpp"
#include "growthcast/image_io.hpp"
#include "growthcast/pairing.hpp"
#include "growthcast/preprocess.hpp"
#include "growthcast/synthcrop.hpp"
#include "growthcast/traits.hpp"

using namespace growthcast;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail = "") {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": " << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// ---------------------------------------------------------------------------
// Criterion 1: Frechet distance vs the commuting-covariance closed form.
void criterion_1() {
    auto start = Clock::now();
    Rng rng(101);
    const int dims[] = {2, 8, 64};
    double max_err = 0.0, max_sym = 0.0, max_self = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        int d = dims[trial % 3];
        Eigen::VectorXd ma(d), mb(d), va(d), vb(d);
        for (int i = 0; i < d; ++i) {
            ma(i) = rng.normal(0, 2);
            mb(i) = rng.normal(0, 2);
            va(i) = 0.05 + rng.uniform(0, 4);
            vb(i) = 0.05 + rng.uniform(0, 4);
        }
        fid::GaussianStats a{ma, Eigen::MatrixXd(va.asDiagonal()), 1000};
        fid::GaussianStats b{mb, Eigen::MatrixXd(vb.asDiagonal()), 1000};

        double got = fid::frechet_distance(a, b);
        double closed = (ma - mb).squaredNorm();
        for (int i = 0; i < d; ++i) {
            double diff = std::sqrt(va(i)) - std::sqrt(vb(i));
            closed += diff * diff;
        }
        max_err = std::max(max_err, std::abs(got - closed));
        max_sym = std::max(max_sym, std::abs(got - fid::frechet_distance(b, a)));
        max_self = std::max(max_self, fid::frechet_distance(a, a));
    }
    double elapsed = seconds_since(start);
    bool pass = max_err < 1e-8 && max_self <= 1e-6 && max_sym <= 1e-6 && elapsed < 10.0;
    std::ostringstream detail;
    detail << "max closed-form error " << max_err << ", max self-distance " << max_self
           << ", max asymmetry " << max_sym << ", " << elapsed << " s";
    report(1, pass, "FID matches the diagonal-Gaussian closed form on 200 pairs", detail.str());
}

// Criterion 2: the 1-D analytic case.
void criterion_2() {
    fid::GaussianStats a, b;
    a.mean = Eigen::VectorXd::Zero(1);
    a.cov = Eigen::MatrixXd::Ones(1, 1);
    a.n = 100;
    b = a;
    b.mean(0) = 1.0;
    double got = fid::frechet_distance(a, b);
    report(2, std::abs(got - 1.0) <= 1e-9, "FID((0,1),(1,1)) == 1.0",
           "got " + std::to_string(got));
}

// Criterion 3: analytic gradients of the combined objective vs central
// finite differences on a double-precision 16x16 model.
void criterion_3() {
    auto start = Clock::now();
    nn::GeneratorConfig gc;
    gc.input_size = 16;
    gc.base_channels = 4;
    gc.depth = 4;
    nn::DiscriminatorConfig dc;
    dc.patch_levels = 2;
    dc.base_channels = 4;
    TrainConfig tc;
    tc.epochs = 2;
    tc.seed = 303;
    GanModel model = make_model(gc, dc, tc);

    Rng rng(303);
    Tensor x(3, 16, 16), y(3, 16, 16);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x.data()[i] = std::tanh(rng.normal(0, 0.5));
        y.data()[i] = std::tanh(rng.normal(0, 0.5));
    }
    const double lambda = 100.0;

    auto combined = [&]() {
        Tensor y_hat = model.generator.forward(x, false, nullptr);
        Tensor grid = model.discriminator.forward(concat_channels(x, y_hat));
        return nn::bce_toward_real(grid).value + lambda * nn::loss_l1(y, y_hat).value;
    };

    Tensor y_hat = model.generator.forward(x, false, nullptr);
    auto adv = nn::bce_toward_real(model.discriminator.forward(concat_channels(x, y_hat)));
    Tensor dxy = model.discriminator.backward(adv.grad, false);
    auto [dx_cond, dy_hat] = nn::split_channels(dxy, 3);
    auto l1 = nn::loss_l1(y, y_hat);
    for (std::size_t i = 0; i < dy_hat.size(); ++i)
        dy_hat.data()[i] += lambda * l1.grad.data()[i];
    model.generator.zero_grad();
    model.generator.backward(dy_hat, true);

    auto params = model.generator.params();
    Rng pick(7);
    int sampled = 0;
    double max_rel = 0.0;
    while (sampled < 210) {
        for (auto& p : params) {
            if (sampled >= 210) break;
            std::size_t i = std::size_t(pick.uniform_int(int(p.value->size())));
            double orig = (*p.value)[i];
            const double h = 1e-5;
            (*p.value)[i] = orig + h;
            double up = combined();
            (*p.value)[i] = orig - h;
            double down = combined();
            (*p.value)[i] = orig;
            double fd = (up - down) / (2 * h);
            double analytic = (*p.grad)[i];
            double rel = std::abs(fd - analytic) / std::max({std::abs(fd), std::abs(analytic), 1e-6});
            max_rel = std::max(max_rel, rel);
            ++sampled;
        }
    }
    double elapsed = seconds_since(start);
    bool pass = max_rel < 1e-4 && elapsed < 120.0;
    std::ostringstream detail;
    detail << sampled << " parameters, max relative error " << max_rel << ", " << elapsed << " s";
    report(3, pass, "combined-objective gradients match finite differences", detail.str());
}

// Criterion 4: loss unit values.
void criterion_4() {
    Tensor zeros(1, 4, 4);
    double d_loss = nn::loss_cgan(zeros, zeros, nn::LossRole::Discriminator);
    bool pass = std::abs(d_loss - 2.0 * std::log(2.0)) <= 1e-9;

    Tensor same(3, 8, 8);
    pass = pass && nn::loss_l1(same, same).value == 0.0;
    Tensor plus(3, 8, 8), minus(3, 8, 8);
    for (std::size_t i = 0; i < plus.size(); ++i) {
        plus.data()[i] = 1.0;
        minus.data()[i] = -1.0;
    }
    pass = pass && nn::loss_l1(plus, minus).value == 2.0;
    report(4, pass, "loss unit values (2 log 2, 0, 2.0)");
}

// Criterion 5: generator shape ladder and discriminator grid size.
void criterion_5() {
    bool pass = true;
    std::string detail;
    for (int size : {64, 128, 256}) {
        nn::GeneratorConfig gc;
        gc.input_size = size;
        gc.base_channels = 4;
        gc.depth = 1;
        while ((size >> (gc.depth + 1)) >= 1) ++gc.depth;
        nn::UNetGenerator gen(gc);
        Rng rng(5);
        gen.init(rng);
        Tensor x(3, size, size);
        for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] = std::tanh(rng.normal());
        Tensor y = gen.forward(x, false, nullptr);
        if (y.channels() != 3 || y.height() != size || y.width() != size) {
            pass = false;
            detail = "generator output shape mismatch at " + std::to_string(size);
        }
    }

    // Receptive-field derivation, computed independently of the network code:
    // three stride-2 blocks then two stride-1 heads, all 4x4 kernels, pad 1.
    auto derived_grid = [](int size) {
        for (int i = 0; i < 3; ++i) size = (size + 2 * 1 - 4) / 2 + 1;
        for (int i = 0; i < 2; ++i) size = (size + 2 * 1 - 4) / 1 + 1;
        return size;
    };
    nn::DiscriminatorConfig dc;
    dc.patch_levels = 3;
    dc.base_channels = 4;
    nn::PatchDiscriminator disc(dc);
    Rng rng(6);
    disc.init(rng);
    for (int size : {64, 128, 256}) {
        Tensor xy(6, size, size);
        for (std::size_t i = 0; i < xy.size(); ++i) xy.data()[i] = std::tanh(rng.normal());
        Tensor grid = disc.forward(xy);
        if (grid.height() != derived_grid(size) || grid.width() != derived_grid(size)) {
            pass = false;
            detail = "patch grid mismatch at " + std::to_string(size) + ": got " +
                     std::to_string(grid.height()) + ", derived " +
                     std::to_string(derived_grid(size));
        }
    }
    if (pass) detail = "256 -> 30x30 patch grid, ladder exact for 64/128/256";
    report(5, pass, "shape ladder and patch-grid receptive field", detail);
}

// Criterion 6: pairing against brute force; cleaning against the harvest log.
void criterion_6(const fs::path& scratch) {
    auto start = Clock::now();
    Rng rng(606);
    std::vector<ImageRecord> records;
    for (int i = 0; i < 500; ++i) {
        ImageRecord r;
        r.image_path = "r" + std::to_string(i) + ".png";
        r.plot_id = "field";
        r.stage = rng.uniform_int(5);
        r.easting_m = rng.uniform(0, 0.5);
        r.northing_m = rng.uniform(0, 0.5);
        records.push_back(r);
    }
    PairingConfig pc;
    pc.horizon = 1;
    auto manifest = build_pairs(records, pc);

    std::set<std::pair<std::string, std::string>> brute;
    for (const auto& a : records) {
        const ImageRecord* best = nullptr;
        double best_d = 0;
        for (const auto& b : records) {
            if (b.stage - a.stage != pc.horizon) continue;
            double d = std::hypot(a.easting_m - b.easting_m, a.northing_m - b.northing_m);
            if (d > pc.distance_threshold_m) continue;
            if (!best || d < best_d || (d == best_d && b.image_path < best->image_path)) {
                best = &b;
                best_d = d;
            }
        }
        if (best) brute.insert({a.image_path, best->image_path});
    }
    std::set<std::pair<std::string, std::string>> got;
    for (const auto& p : manifest.pairs) got.insert({p.input.image_path, p.reference.image_path});
    bool pairs_ok = got == brute;

    // cleaning vs the synthetic harvest log
    synthcrop::SynthConfig sc;
    sc.n_plants = 30;
    sc.stages = 4;
    sc.image_size = 32;
    sc.harvest_fraction = 0.4;
    sc.seed = 606;
    auto summary = synthcrop::generate_dataset(sc, scratch / "c6");
    PairingConfig clean_cfg;
    clean_cfg.horizon = 1;
    clean_cfg.drop_appearing = true;
    clean_cfg.drop_disappearing = true;
    auto full = build_pairs(summary.records, clean_cfg);
    std::unordered_map<std::string, bool> vis;
    for (const auto& g : summary.ground_truth) vis[g.image_path] = g.visible;
    auto cleaned = clean_pairs(full, vis, clean_cfg);
    std::size_t expect = 0;
    for (const auto& p : full.pairs) {
        bool vi = vis.at(p.input.image_path), vr = vis.at(p.reference.image_path);
        if ((vr && !vi) || (vi && !vr)) continue;
        ++expect;
    }
    bool clean_ok = cleaned.pairs.size() == expect && cleaned.pairs.size() < full.pairs.size();

    double elapsed = seconds_since(start);
    bool pass = pairs_ok && clean_ok && elapsed < 5.0;
    std::ostringstream detail;
    detail << manifest.pairs.size() << " pairs match brute force; cleaning kept "
           << cleaned.pairs.size() << "/" << full.pairs.size() << "; " << elapsed << " s";
    report(6, pass, "pairing equals the O(n^2) oracle; cleaning equals the harvest-log filter",
           detail.str());
}

// Criterion 7: augmentation contract over 1000 seeded draws.
void criterion_7() {
    AugmentConfig cfg;
    cfg.target_size = 256;
    cfg.random_crop = true;
    cfg.flip_horizontal = true;
    cfg.flip_vertical = true;
    cfg.rotations_deg = {0, 180};

    Tensor grid(3, 300, 300);
    for (int y = 0; y < 300; ++y)
        for (int x = 0; x < 300; ++x) {
            grid.at(0, y, x) = 2.0 * x / 299.0 - 1.0;
            grid.at(1, y, x) = 2.0 * y / 299.0 - 1.0;
            grid.at(2, y, x) = 0.0;
        }

    Rng rng(707);
    bool rotations_ok = true, identical_ok = true, shape_ok = true;
    for (int draw = 0; draw < 1000; ++draw) {
        TransformSample s = sample_transform(300, 300, cfg, rng);
        if (s.rotation_deg != 0 && s.rotation_deg != 180) rotations_ok = false;
        if (draw % 50 == 0) {
            // displacement-field equality on the coordinate grid
            Rng pair_rng(derive_seed(707, {std::uint64_t(draw)}));
            auto [a, b] = augment_pair(grid, grid, cfg, pair_rng);
            if (!(a == b)) identical_ok = false;
            if (a.height() != 256 || a.width() != 256) shape_ok = false;
        }
    }
    bool pass = rotations_ok && identical_ok && shape_ok;
    report(7, pass, "1000 draws: rotations in {0,180}, paired transforms identical, 256x256",
           rotations_ok ? (identical_ok ? "" : "pair transforms differ") : "bad rotation");
}

// Criterion 8: baseline segmenter vs ground truth; traits vs mask walk.
void criterion_8() {
    SegmenterConfig seg_cfg;
    int scenes_ok = 0, traits_ok = 0, eligible = 0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        synthcrop::RosetteSpec spec;
        spec.center_x_px = 32 + (i % 5) - 2;
        spec.center_y_px = 32 + (i % 3) - 1;
        spec.target_area_px = 520 + 22 * i;  // all at or above 500 px
        spec.leaf_count = 7 + i % 6;
        spec.identity_seed = derive_seed(808, {std::uint64_t(i)});
        auto scene = synthcrop::render_scene(64, {spec}, derive_seed(809, {std::uint64_t(i)}));
        long truth = 0;
        for (auto v : scene.union_mask) truth += v ? 1 : 0;
        if (truth < 500) continue;
        ++eligible;

        auto instances = segment(scene.image, seg_cfg);
        if (instances.size() != 1) continue;
        double err = std::abs(double(instances[0].area()) - double(truth)) / double(truth);
        worst = std::max(worst, err);
        if (err <= 0.05) ++scenes_ok;

        // independent mask-walk recomputation of every trait
        ImageRecord meta{"scene.png", "p", 3, 0, 0, Treatment::IpFp, Split::Test};
        auto recs = extract_traits(instances, meta);
        bool all_equal = recs.size() == instances.size();
        for (std::size_t k = 0; all_equal && k < recs.size(); ++k) {
            long area = 0;
            int xmin = 64, xmax = -1, ymin = 64, ymax = -1;
            for (int y = 0; y < 64; ++y)
                for (int x = 0; x < 64; ++x)
                    if (instances[k].mask[std::size_t(y) * 64 + x]) {
                        ++area;
                        xmin = std::min(xmin, x);
                        xmax = std::max(xmax, x);
                        ymin = std::min(ymin, y);
                        ymax = std::max(ymax, y);
                    }
            all_equal = recs[k].projected_leaf_area_px == area &&
                        recs[k].width_px == xmax + 1 - xmin &&
                        recs[k].height_px == ymax + 1 - ymin &&
                        recs[k].center_x == (xmin + xmax + 1) / 2.0 &&
                        recs[k].center_y == (ymin + ymax + 1) / 2.0;
        }
        if (all_equal) ++traits_ok;
    }
    bool pass = eligible == 50 && scenes_ok == 50 && traits_ok == 50;
    std::ostringstream detail;
    detail << scenes_ok << "/50 scenes within 5% (worst " << worst << "), " << traits_ok
           << "/50 trait recomputations exact";
    report(8, pass, "baseline segmenter area within 5%; traits equal the mask walk",
           detail.str());
}

// Criterion 9: analytics oracles.
void criterion_9() {
    std::vector<PairedObservation> line;
    for (double x : {1.0, 2.0, 4.0, 8.0}) line.push_back({x, 2.0 * x + 1.0, 0, Treatment::None});
    auto exact = fit_regression(line);
    bool pass = exact.slope == 2.0 && exact.intercept == 1.0 && exact.r_squared == 1.0;

    Rng rng(909);
    std::vector<PairedObservation> noisy;
    for (int i = 0; i < 100; ++i) {
        double x = rng.uniform(0, 40);
        noisy.push_back({x, 3.0 * x + 2.0 + rng.normal(0, 1.5), 0, Treatment::None});
    }
    auto fit = fit_regression(noisy);
    double n = 100, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : noisy) {
        sx += p.reference_area_px;
        sy += p.generated_area_px;
        sxx += p.reference_area_px * p.reference_area_px;
        sxy += p.reference_area_px * p.generated_area_px;
    }
    double det = n * sxx - sx * sx;
    double slope = (n * sxy - sx * sy) / det;
    double intercept = (sxx * sy - sx * sxy) / det;
    pass = pass && std::abs(fit.slope - slope) < 1e-10 &&
           std::abs(fit.intercept - intercept) < 1e-10;

    std::vector<TraitRecord> records;
    for (int i = 0; i < 120; ++i) {
        TraitRecord r;
        r.projected_leaf_area_px = rng.uniform_int(3000);
        r.stage = rng.uniform_int(4);
        r.treatment = kAllTreatments[rng.uniform_int(4)];
        records.push_back(r);
    }
    auto stats = stage_statistics(records, true);
    std::map<std::pair<int, int>, std::vector<double>> oracle;
    for (const auto& r : records)
        oracle[{r.stage, int(r.treatment)}].push_back(double(r.projected_leaf_area_px));
    bool stats_ok = stats.size() == oracle.size();
    for (const auto& s : stats) {
        if (!stats_ok) break;
        const auto& g = oracle.at({s.stage, int(s.treatment)});
        double mean = 0;
        for (double a : g) mean += a;
        mean /= double(g.size());
        double var = 0;
        for (double a : g) var += (a - mean) * (a - mean);
        var /= double(g.size());
        stats_ok = std::abs(s.mean_area_px - mean) < 1e-9 &&
                   std::abs(s.std_area_px - std::sqrt(var)) < 1e-9 && s.n == long(g.size());
    }
    pass = pass && stats_ok;
    report(9, pass, "regression and stage statistics match their oracles");
}

// ---------------------------------------------------------------------------
// Criteria 10-12 share one experiment recipe.

struct ExperimentPaths {
    fs::path root, data, pairs_train, pairs_test, model, generated, traits_ref, traits_gen, fid,
        report_dir;
};

RunConfig experiment_config() {
    return RunConfig::resolve(
        "", {{"profile", "synthetic"},
             {"seed", "12345"},
             {"synth.n_plants", "120"},
             {"synth.stages", "6"},
             {"synth.image_size", "64"},
             {"pair.horizon", "3"}});
}

ExperimentPaths run_experiment(const fs::path& root) {
    ExperimentPaths p;
    p.root = root;
    p.data = root / "data";
    p.pairs_train = root / "pairs_train";
    p.pairs_test = root / "pairs_test";
    p.model = root / "model";
    p.generated = root / "generated";
    p.traits_ref = root / "traits_ref";
    p.traits_gen = root / "traits_gen";
    p.fid = root / "fid";
    p.report_dir = root / "report";

    RunConfig cfg = experiment_config();
    commands::cmd_synth(cfg, p.data);

    // ground-truth visibility feeds the cleaning rules
    fs::path visibility = p.data / "visibility.csv";
    {
        auto gt = synthcrop::load_ground_truth_csv(p.data / "ground_truth.csv");
        std::ofstream out(visibility, std::ios::binary);
        out << "image_path,visible\n";
        for (const auto& g : gt) out << g.image_path << "," << (g.visible ? 1 : 0) << "\n";
    }
    commands::cmd_pair(cfg, p.data / "records.csv", "train", visibility, p.pairs_train);
    commands::cmd_pair(cfg, p.data / "records.csv", "test", visibility, p.pairs_test);
    commands::cmd_train(cfg, p.pairs_train, p.model);
    commands::cmd_predict(cfg, p.model / "model.ckpt", p.pairs_test, p.generated);
    commands::cmd_segment(cfg, p.pairs_test, commands::SegmentRole::Reference, "", p.traits_ref);
    commands::cmd_segment(cfg, p.pairs_test, commands::SegmentRole::Generated, p.generated,
                          p.traits_gen);
    commands::cmd_evaluate(cfg, p.generated, p.pairs_test, p.pairs_train, p.fid);
    commands::cmd_report(cfg, p.traits_ref / "traits.csv", p.traits_gen / "traits.csv",
                         p.pairs_test, p.fid / "fid.json", p.pairs_train, p.report_dir);
    return p;
}

void criterion_10(const ExperimentPaths& paths, double elapsed_s) {
    auto summary = nlohmann::json::parse(read_file(paths.report_dir / "summary.json"));
    double r2 = summary.at("regressions").at("pooled").at("r_squared").get<double>();

    // generated mean-area ordering at the final stage
    std::map<std::string, double> final_means;
    int final_stage = 0;
    for (const auto& s : summary.at("stage_stats").at("generated"))
        final_stage = std::max(final_stage, s.at("stage").get<int>());
    for (const auto& s : summary.at("stage_stats").at("generated"))
        if (s.at("stage").get<int>() == final_stage)
            final_means[s.at("treatment").get<std::string>()] = s.at("mean_area_px").get<double>();
    bool ordering = final_means.count("i+f+") && final_means.count("i+f-") &&
                    final_means.count("i-f+") && final_means.count("i-f-") &&
                    final_means["i+f+"] > final_means["i+f-"] &&
                    final_means["i+f-"] > final_means["i-f+"] &&
                    final_means["i-f+"] > final_means["i-f-"];

    bool pass = r2 >= 0.6 && ordering && elapsed_s <= 45.0 * 60.0;
    std::ostringstream detail;
    detail << "pooled R^2 = " << r2 << "; final-stage generated means";
    for (const char* t : {"i+f+", "i+f-", "i-f+", "i-f-"})
        detail << " " << t << "=" << (final_means.count(t) ? final_means[t] : -1.0);
    detail << "; " << elapsed_s << " s";
    report(10, pass, "end-to-end synthetic experiment: R^2 >= 0.6 and treatment ordering",
           detail.str());
}

void criterion_11(const ExperimentPaths& paths) {
    RunConfig cfg = experiment_config();
    fid::RandomProjectionEmbedding provider(std::uint64_t(cfg.get_long("seed", 0)),
                                            int(cfg.get_long("fid.feature_dim", 64)),
                                            int(cfg.get_long("fid.input_size", 64)));
    PairManifest test_manifest = load_manifest(paths.pairs_test);
    std::vector<Tensor> reference_test, inputs, generated;
    for (const auto& pair : test_manifest.pairs) {
        reference_test.push_back(raster_to_tensor(read_raster(pair.reference.image_path)));
        inputs.push_back(raster_to_tensor(read_raster(pair.input.image_path)));
        generated.push_back(raster_to_tensor(read_raster(
            paths.generated / fs::path(pair.input.image_path).filename())));
    }
    auto r = fid::fit_gaussian(provider.embed(reference_test));
    auto g = fid::fit_gaussian(provider.embed(generated));
    auto wrong_stage = fid::fit_gaussian(provider.embed(inputs));
    double fid_rg = fid::frechet_distance(r, g);
    double fid_r_wrong = fid::frechet_distance(r, wrong_stage);
    bool pass = fid_rg < fid_r_wrong;
    std::ostringstream detail;
    detail << "FID(ref, generated) = " << fid_rg << " vs FID(ref, inputs) = " << fid_r_wrong;
    report(11, pass, "generation moves the distribution toward the target stage", detail.str());
}

void criterion_12(const ExperimentPaths& first, const fs::path& scratch) {
    auto second = run_experiment(scratch / "run2");
    std::string a = read_file(first.report_dir / "summary.json");
    std::string b = read_file(second.report_dir / "summary.json");
    bool pass = !a.empty() && a == b;
    report(12, pass, "two identically seeded runs produce identical summary.json",
           pass ? "byte-identical" : "outputs differ");
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    auto wanted = [&](int n) { return selected.empty() || selected.count(n) > 0; };

    fs::path scratch = fs::temp_directory_path() / "growthcast_acceptance";
    fs::remove_all(scratch);
    fs::create_directories(scratch);

    try {
        if (wanted(1)) criterion_1();
        if (wanted(2)) criterion_2();
        if (wanted(3)) criterion_3();
        if (wanted(4)) criterion_4();
        if (wanted(5)) criterion_5();
        if (wanted(6)) criterion_6(scratch);
        if (wanted(7)) criterion_7();
        if (wanted(8)) criterion_8();
        if (wanted(9)) criterion_9();
        if (wanted(10) || wanted(11) || wanted(12)) {
            auto start = Clock::now();
            auto paths = run_experiment(scratch / "run1");
            double elapsed = seconds_since(start);
            if (wanted(10)) criterion_10(paths, elapsed);
            if (wanted(11)) criterion_11(paths);
            if (wanted(12)) criterion_12(paths, scratch);
        }
    } catch (const std::exception& e) {
        std::cout << "[FAIL] acceptance aborted: " << e.what() << std::endl;
        return 1;
    }

    std::cout << (g_failures == 0 ? "acceptance: all criteria passed"
                                  : "acceptance: " + std::to_string(g_failures) + " failed")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
