#include "growthcast/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <unordered_map>

#include "growthcast/analytics.hpp"
#include "growthcast/cgan.hpp"
#include "growthcast/csv.hpp"
#include "growthcast/fid.hpp"
#include "growthcast/image_io.hpp"
#include "growthcast/num.hpp"
#include "growthcast/pairing.hpp"
#include "growthcast/preprocess.hpp"
#include "growthcast/synthcrop.hpp"
#include "growthcast/traits.hpp"

namespace growthcast::commands {

namespace {

synthcrop::SynthConfig synth_config_from(const RunConfig& cfg) {
    synthcrop::SynthConfig sc;
    sc.n_plants = int(cfg.get_long("synth.n_plants", sc.n_plants));
    sc.stages = int(cfg.get_long("synth.stages", sc.stages));
    sc.image_size = int(cfg.get_long("synth.image_size", sc.image_size));
    sc.base_area = cfg.get_double("synth.base_area", sc.base_area);
    sc.growth_rate = cfg.get_double("synth.growth_rate", sc.growth_rate);
    sc.jitter_m = cfg.get_double("synth.jitter_m", sc.jitter_m);
    sc.test_fraction = cfg.get_double("synth.test_fraction", sc.test_fraction);
    sc.harvest_fraction = cfg.get_double("synth.harvest_fraction", sc.harvest_fraction);
    sc.visible_min_area = cfg.get_long("traits.min_area", sc.visible_min_area);
    sc.seed = std::uint64_t(cfg.get_long("seed", 0));
    return sc;
}

AugmentConfig augment_config_from(const RunConfig& cfg) {
    AugmentConfig ac;
    ac.target_size = int(cfg.get_long("augment.target_size", ac.target_size));
    ac.random_crop = cfg.get_bool("augment.random_crop", ac.random_crop);
    ac.flip_horizontal = cfg.get_bool("augment.flip_horizontal", ac.flip_horizontal);
    ac.flip_vertical = cfg.get_bool("augment.flip_vertical", ac.flip_vertical);
    ac.rotations_deg = cfg.get_int_set("augment.rotations", ac.rotations_deg);
    ac.crop_scale_min = cfg.get_double("augment.crop_scale_min", ac.crop_scale_min);
    return ac;
}

nn::GeneratorConfig generator_config_from(const RunConfig& cfg) {
    nn::GeneratorConfig gc;
    gc.input_size = int(cfg.get_long("gen.input_size", gc.input_size));
    gc.base_channels = int(cfg.get_long("gen.base_channels", gc.base_channels));
    gc.depth = int(cfg.get_long("gen.depth", gc.depth));
    gc.dropout_rate = cfg.get_double("gen.dropout_rate", gc.dropout_rate);
    return gc;
}

nn::DiscriminatorConfig discriminator_config_from(const RunConfig& cfg) {
    nn::DiscriminatorConfig dc;
    dc.patch_levels = int(cfg.get_long("disc.patch_levels", dc.patch_levels));
    dc.base_channels = int(cfg.get_long("disc.base_channels", dc.base_channels));
    return dc;
}

TrainConfig train_config_from(const RunConfig& cfg) {
    TrainConfig tc;
    tc.lambda_l1 = cfg.get_double("train.lambda_l1", tc.lambda_l1);
    tc.learning_rate = cfg.get_double("train.learning_rate", tc.learning_rate);
    tc.batch_size = int(cfg.get_long("train.batch_size", tc.batch_size));
    tc.epochs = int(cfg.get_long("train.epochs", tc.epochs));
    tc.checkpoint_interval = int(cfg.get_long("train.checkpoint_interval", 0));
    tc.seed = std::uint64_t(cfg.get_long("seed", 0));
    return tc;
}

SegmenterConfig segmenter_config_from(const RunConfig& cfg) {
    SegmenterConfig sc;
    std::string backend = cfg.get_string("traits.backend", "baseline");
    if (backend == "baseline")
        sc.backend = SegmenterBackend::Baseline;
    else if (backend == "external")
        sc.backend = SegmenterBackend::External;
    else
        throw ConfigError("traits.backend must be 'baseline' or 'external'");
    sc.min_area = cfg.get_long("traits.min_area", sc.min_area);
    sc.external_command = cfg.get_string("traits.external_command", "");
    return sc;
}

std::unique_ptr<fid::EmbeddingProvider> embedding_provider_from(const RunConfig& cfg) {
    std::string kind = cfg.get_string("fid.embedding", "random_projection");
    int feature_dim = int(cfg.get_long("fid.feature_dim", 2048));
    int input_size = int(cfg.get_long("fid.input_size", 299));
    if (kind == "random_projection") {
        return std::make_unique<fid::RandomProjectionEmbedding>(
            std::uint64_t(cfg.get_long("seed", 0)), feature_dim, input_size);
    }
    if (kind == "pretrained") {
        return std::make_unique<fid::PretrainedEmbedding>(cfg.require_string("fid.model_source"),
                                                          feature_dim, input_size);
    }
    throw ConfigError("fid.embedding must be 'random_projection' or 'pretrained'");
}

PairingConfig pairing_config_from(const RunConfig& cfg) {
    PairingConfig pc;
    pc.distance_threshold_m = cfg.get_double("pair.threshold_m", pc.distance_threshold_m);
    pc.horizon = int(cfg.get_long("pair.horizon", pc.horizon));
    pc.drop_appearing = cfg.get_bool("pair.drop_appearing", pc.drop_appearing);
    pc.drop_disappearing = cfg.get_bool("pair.drop_disappearing", pc.drop_disappearing);
    return pc;
}

std::unordered_map<std::string, bool> visibility_from_csv(const fs::path& path) {
    csv::Table table = csv::read_file(path);
    std::unordered_map<std::string, bool> out;
    for (const auto& row : table.rows) out[row[0]] = row[1] == "1" || row[1] == "true";
    return out;
}

std::unordered_map<std::string, bool> visibility_from_segmenter(
    const PairManifest& manifest, const SegmenterConfig& seg_cfg) {
    std::unordered_map<std::string, bool> out;
    for (const auto& pair : manifest.pairs) {
        for (const auto* rec : {&pair.input, &pair.reference}) {
            if (out.count(rec->image_path)) continue;
            Tensor image = raster_to_tensor(read_raster(rec->image_path));
            SegmenterConfig per_image = seg_cfg;
            per_image.image_path = rec->image_path;
            out[rec->image_path] = !segment(image, per_image).empty();
        }
    }
    return out;
}

Tensor load_model_input(const fs::path& path, int input_size) {
    Tensor t = load_and_pad(path);
    if (t.height() < input_size)
        throw DataError("image " + path.string() + " is smaller than the model input size");
    return resize_bilinear(t, input_size, input_size);
}

// Per image, the instance whose center sits nearest the frame center; images
// with no instances are skipped.
std::unordered_map<std::string, TraitRecord> central_instance_by_image(
    const std::vector<TraitRecord>& records, double image_size) {
    std::unordered_map<std::string, TraitRecord> best;
    const double c = image_size / 2.0;
    for (const auto& r : records) {
        double d = std::hypot(r.center_x - c, r.center_y - c);
        auto it = best.find(r.source_image);
        if (it == best.end() ||
            d < std::hypot(it->second.center_x - c, it->second.center_y - c))
            best[r.source_image] = r;
    }
    return best;
}

}  // namespace

std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> out;
    if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        std::string ext = entry.path().extension().string();
        if (name.size() > 9 && name.substr(name.size() - 9) == ".mask.png") continue;
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

void cmd_synth(const RunConfig& cfg, const fs::path& out_dir) {
    auto sc = synth_config_from(cfg);
    auto summary = synthcrop::generate_dataset(sc, out_dir);
    cfg.write_into(out_dir);
    std::cout << "synth: wrote " << summary.images_written << " images for " << sc.n_plants
              << " plants over " << sc.stages << " stages\n";
}

void cmd_pair(const RunConfig& cfg, const fs::path& records, const std::string& split,
              const fs::path& visibility_csv, const fs::path& out_dir) {
    auto all_records = load_records_csv(records);
    std::vector<ImageRecord> selected;
    for (const auto& r : all_records) {
        if (split == "all" || to_string(r.split) == split) selected.push_back(r);
    }
    if (split != "all" && split != "train" && split != "test")
        throw ConfigError("split must be train, test, or all");

    auto pc = pairing_config_from(cfg);
    std::vector<std::string> warnings;
    PairManifest manifest = build_pairs(selected, pc, &warnings);
    manifest.stage_unit = cfg.get_string("stage_unit", "week");
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    if (pc.drop_appearing || pc.drop_disappearing) {
        auto visibility = visibility_csv.empty()
                              ? visibility_from_segmenter(manifest, segmenter_config_from(cfg))
                              : visibility_from_csv(visibility_csv);
        manifest = clean_pairs(manifest, visibility, pc);
    }

    save_manifest(manifest, out_dir);
    cfg.write_into(out_dir);
    auto counts = manifest_counts(manifest);
    std::ofstream counts_file(out_dir / "counts.txt", std::ios::binary);
    counts_file << counts.to_text();
    std::cout << counts.to_text();
}

void cmd_train(const RunConfig& cfg, const fs::path& pairs_dir, const fs::path& out_dir) {
    // Configuration problems must surface before any data is read.
    auto model = make_model(generator_config_from(cfg), discriminator_config_from(cfg),
                            train_config_from(cfg));
    AugmentConfig ac = augment_config_from(cfg);
    ac.validate();
    if (ac.target_size != model.generator_config.input_size)
        throw ConfigError("augment.target_size must match gen.input_size");
    PairManifest manifest = load_manifest(pairs_dir);

    fs::create_directories(out_dir);
    cfg.write_into(out_dir);
    TrainOptions options;
    options.checkpoint_dir = out_dir;
    options.on_epoch = [](const EpochStats& e) {
        std::cout << "epoch " << e.epoch << ": loss_d=" << e.loss_d
                  << " loss_g_adv=" << e.loss_g_adv << " loss_g_l1=" << e.loss_g_l1
                  << " lr=" << e.lr << "\n";
    };
    TrainReport report = train(model, manifest, ac, options);
    write_history_csv(report.history, out_dir / "history.csv");
}

void cmd_predict(const RunConfig& cfg, const fs::path& model_path, const fs::path& pairs_dir,
                 const fs::path& out_dir) {
    GanModel model = load_checkpoint(model_path);
    PairManifest manifest = load_manifest(pairs_dir);
    bool stochastic = cfg.get_bool("predict.stochastic", true);
    std::uint64_t seed = std::uint64_t(cfg.get_long("seed", 0));

    fs::create_directories(out_dir);
    cfg.write_into(out_dir);
    std::vector<Tensor> inputs;
    inputs.reserve(manifest.pairs.size());
    for (const auto& pair : manifest.pairs)
        inputs.push_back(load_model_input(pair.input.image_path,
                                          model.generator_config.input_size));
    auto outputs = predict(model, inputs, stochastic, seed);
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        fs::path name = fs::path(manifest.pairs[i].input.image_path).filename();
        write_image_tensor(outputs[i], out_dir / name);
    }
    std::cout << "predict: wrote " << outputs.size() << " images\n";
}

void cmd_segment(const RunConfig& cfg, const fs::path& pairs_dir, SegmentRole role,
                 const fs::path& generated_dir, const fs::path& out_dir) {
    PairManifest manifest = load_manifest(pairs_dir);
    SegmenterConfig seg_cfg = segmenter_config_from(cfg);

    fs::create_directories(out_dir);
    cfg.write_into(out_dir);
    std::vector<TraitRecord> traits;
    for (const auto& pair : manifest.pairs) {
        ImageRecord meta;
        fs::path image_path;
        switch (role) {
            case SegmentRole::Input:
                meta = pair.input;
                image_path = pair.input.image_path;
                break;
            case SegmentRole::Reference:
                meta = pair.reference;
                image_path = pair.reference.image_path;
                break;
            case SegmentRole::Generated:
                if (generated_dir.empty())
                    throw ConfigError("segment: generated role needs a generated directory");
                meta = pair.reference;  // a prediction depicts the reference stage
                image_path = generated_dir / fs::path(pair.input.image_path).filename();
                meta.image_path = image_path.string();
                break;
        }
        Tensor image = raster_to_tensor(read_raster(image_path));
        SegmenterConfig per_image = seg_cfg;
        per_image.image_path = image_path;
        auto records = extract_traits(segment(image, per_image), meta);
        traits.insert(traits.end(), records.begin(), records.end());
    }
    save_traits_csv(traits, out_dir / "traits.csv");
    std::cout << "segment: " << traits.size() << " instances over " << manifest.pairs.size()
              << " images\n";
}

namespace {

std::vector<Tensor> load_image_set(const fs::path& path) {
    std::vector<fs::path> files;
    if (fs::exists(path / "pairs.jsonl")) {
        PairManifest manifest = load_manifest(path);
        for (const auto& pair : manifest.pairs) files.push_back(pair.reference.image_path);
        std::sort(files.begin(), files.end());
    } else {
        files = list_images(path);
    }
    std::vector<Tensor> images;
    images.reserve(files.size());
    for (const auto& f : files) images.push_back(raster_to_tensor(read_raster(f)));
    return images;
}

}  // namespace

void cmd_evaluate(const RunConfig& cfg, const fs::path& generated, const fs::path& reference_test,
                  const fs::path& reference_train, const fs::path& out_dir) {
    auto provider = embedding_provider_from(cfg);
    auto gen = load_image_set(generated);
    auto ref_test = load_image_set(reference_test);
    auto ref_train = load_image_set(reference_train);
    auto triple = fid::fid_protocol(*provider, ref_test, gen, ref_train);

    fs::create_directories(out_dir);
    cfg.write_into(out_dir);
    std::ofstream os(out_dir / "fid.json", std::ios::binary);
    os << fid::fid_to_json(triple);
    std::cout << fid::fid_to_json(triple) << fid::fid_verdict(triple) << "\n";
}

void cmd_report(const RunConfig& cfg, const fs::path& reference_traits,
                const fs::path& generated_traits, const fs::path& pairs_dir,
                const fs::path& fid_json, const fs::path& train_pairs_dir,
                const fs::path& out_dir) {
    PairManifest manifest = load_manifest(pairs_dir);
    auto ref_records = load_traits_csv(reference_traits);
    auto gen_records = load_traits_csv(generated_traits);

    double image_size = cfg.get_double("report.image_size",
                                       double(cfg.get_long("gen.input_size", 256)));
    double center_fraction = cfg.get_double("traits.center_fraction", 1.0 / 3.0);

    auto ref_central = central_instance_by_image(ref_records, image_size);
    auto gen_central = central_instance_by_image(gen_records, image_size);

    ReportInputs inputs;
    inputs.center_fraction = center_fraction;
    inputs.stage_unit = manifest.stage_unit;

    // Generated traits carry the generated image path; predictions are named
    // after the pair's input file.
    std::unordered_map<std::string, TraitRecord> gen_by_name;
    for (const auto& [path, rec] : gen_central)
        gen_by_name[fs::path(path).filename().string()] = rec;

    std::map<std::string, std::vector<PairedObservation>> groups;
    for (const auto& pair : manifest.pairs) {
        auto rit = ref_central.find(pair.reference.image_path);
        auto git = gen_by_name.find(fs::path(pair.input.image_path).filename().string());
        if (rit == ref_central.end() || git == gen_by_name.end()) continue;
        PairedObservation obs;
        obs.reference_area_px = double(rit->second.projected_leaf_area_px);
        obs.generated_area_px = double(git->second.projected_leaf_area_px);
        obs.stage = pair.reference.stage;
        obs.treatment = pair.reference.treatment;
        groups["pooled"].push_back(obs);
        if (obs.treatment != Treatment::None) groups[to_string(obs.treatment)].push_back(obs);
    }
    if (groups["pooled"].empty())
        throw DataError("report: no paired observations (check trait CSVs and manifest)");

    for (Treatment t : kAllTreatments) {
        std::string name = to_string(t);
        if (!groups.count(name)) inputs.skipped_groups.push_back(name);
    }
    for (auto& [name, observations] : groups) {
        if (observations.size() < 2) {
            inputs.skipped_groups.push_back(name);
            continue;
        }
        inputs.regressions[name] = fit_regression(observations);
        inputs.scatter_points[name] = observations;
    }
    std::sort(inputs.skipped_groups.begin(), inputs.skipped_groups.end());

    auto center_filter = [&](const std::vector<TraitRecord>& records) {
        return select_center_plants(records, int(image_size), center_fraction);
    };
    auto ref_centered = center_filter(ref_records);
    auto gen_centered = center_filter(gen_records);
    if (!ref_centered.empty()) inputs.reference_stats = stage_statistics(ref_centered, true);
    if (!gen_centered.empty()) inputs.generated_stats = stage_statistics(gen_centered, true);

    if (!fid_json.empty()) {
        std::ifstream in(fid_json);
        if (!in) throw DataError("cannot open FID JSON: " + fid_json.string());
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        inputs.fid = fid::fid_from_json(text);
    }

    if (!train_pairs_dir.empty()) {
        PairManifest train_manifest = load_manifest(train_pairs_dir);
        std::map<int, long> train_counts;
        for (const auto& pair : train_manifest.pairs) ++train_counts[pair.reference.stage];
        for (const auto& pair : manifest.pairs) {
            int s = pair.reference.stage;
            if (!train_counts.count(s)) train_counts[s] = 0;
        }
        inputs.training_pairs_per_stage = train_counts;
    }

    render_report(inputs, out_dir);
    cfg.write_into(out_dir);
    std::cout << "report: wrote " << (out_dir / "summary.json").string() << "\n";
}

}  // namespace growthcast::commands
