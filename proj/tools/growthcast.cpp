#include <omp.h>

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "growthcast/commands.hpp"

namespace {

using growthcast::RunConfig;
namespace cmds = growthcast::commands;

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 ok, 2 configuration error (also unknown flags), 3 data error, "
    "4 numeric error, 5 backend error. Failures print a single line: "
    "error: [<kind>] <message>";

struct GlobalArgs {
    std::string config_file;
    std::map<std::string, std::string> overrides;
    bool dry_run = false;

    RunConfig resolve() const { return RunConfig::resolve(config_file, overrides); }
};

// Flags shared by every subcommand; each maps onto a dotted config key so
// that flags > env > file holds uniformly.
void add_common_flags(CLI::App* cmd, GlobalArgs& args) {
    cmd->add_option("--config", args.config_file, "flat key=value configuration file");
    cmd->add_option_function<std::string>(
        "--seed", [&args](const std::string& v) { args.overrides["seed"] = v; },
        "RNG seed (env GROWTHCAST_SEED)");
    cmd->add_option_function<std::string>(
        "--profile", [&args](const std::string& v) { args.overrides["profile"] = v; },
        "experiment profile: cauliflower, rosette, synthetic");
    cmd->add_option_function<std::string>(
        "--workers", [&args](const std::string& v) { args.overrides["workers"] = v; },
        "worker-pool cap (0 = all cores)");
    cmd->add_option_function<std::vector<std::string>>(
        "--set", [&args](const std::vector<std::string>& kvs) {
            for (const auto& kv : kvs) {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw CLI::ValidationError("--set expects key=value, got '" + kv + "'");
                args.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
        },
        "override any config key (key=value, repeatable)");
    cmd->add_flag("--dry-run", args.dry_run,
                  "validate and print the resolved configuration, run nothing");
}

bool handle_dry_run(const GlobalArgs& args) {
    if (!args.dry_run) return false;
    std::cout << args.resolve().to_text();
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"growthcast: crop growth forecasting with a conditional GAN"};
    app.footer(kExitCodeHelp);
    app.require_subcommand(1);

    GlobalArgs args;

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic crop time-series dataset");
    std::string synth_out;
    synth->add_option("--out", synth_out, "output directory")->required();
    add_common_flags(synth, args);

    // pair
    auto* pair = app.add_subcommand("pair", "build aligned cross-time image pairs");
    std::string pair_records, pair_split = "all", pair_visibility, pair_out;
    pair->add_option("--records", pair_records, "observations CSV")->required();
    pair->add_option("--split", pair_split, "train|test|all (default all)");
    pair->add_option("--visibility", pair_visibility,
                     "image_path,visible CSV for cleaning (default: segmentation backend)");
    pair->add_option("--out", pair_out, "output manifest directory")->required();
    pair->add_option_function<std::string>(
        "--horizon", [&args](const std::string& v) { args.overrides["pair.horizon"] = v; },
        "stage delta between pair members");
    pair->add_option_function<std::string>(
        "--threshold", [&args](const std::string& v) { args.overrides["pair.threshold_m"] = v; },
        "alignment distance threshold in metres");
    pair->add_flag_callback(
        "--no-clean",
        [&args]() {
            args.overrides["pair.drop_appearing"] = "false";
            args.overrides["pair.drop_disappearing"] = "false";
        },
        "skip visibility cleaning");
    add_common_flags(pair, args);

    // train
    auto* train = app.add_subcommand("train", "train the growth model on aligned pairs");
    std::string train_pairs, train_out;
    train->add_option("--pairs", train_pairs, "pair manifest directory")->required();
    train->add_option("--out", train_out, "output directory")->required();
    add_common_flags(train, args);

    // predict
    auto* predict = app.add_subcommand("predict", "generate future-stage images for pair inputs");
    std::string predict_model, predict_pairs, predict_out;
    predict->add_option("--model", predict_model, "model checkpoint (.ckpt)")->required();
    predict->add_option("--pairs", predict_pairs, "pair manifest directory")->required();
    predict->add_option("--out", predict_out, "output directory")->required();
    predict->add_option_function<std::string>(
        "--stochastic", [&args](const std::string& v) { args.overrides["predict.stochastic"] = v; },
        "true keeps dropout active at inference (default true)");
    add_common_flags(predict, args);

    // segment
    auto* segment = app.add_subcommand("segment", "segment plants and extract traits");
    std::string segment_pairs, segment_role = "reference", segment_generated, segment_out;
    segment->add_option("--pairs", segment_pairs, "pair manifest directory")->required();
    segment->add_option("--role", segment_role, "input|reference|generated (default reference)");
    segment->add_option("--generated", segment_generated,
                        "directory of generated images (role generated)");
    segment->add_option("--out", segment_out, "output directory")->required();
    segment->add_option_function<std::string>(
        "--backend", [&args](const std::string& v) { args.overrides["traits.backend"] = v; },
        "baseline|external");
    segment->add_option_function<std::string>(
        "--min-area", [&args](const std::string& v) { args.overrides["traits.min_area"] = v; },
        "minimum instance area in pixels");
    add_common_flags(segment, args);

    // evaluate (the FID step)
    auto* evaluate = app.add_subcommand("evaluate", "compute the FID score triple");
    evaluate->alias("evaluate-fid");
    std::string eval_generated, eval_ref_test, eval_ref_train, eval_out;
    evaluate->add_option("--generated", eval_generated, "generated image directory")->required();
    evaluate->add_option("--reference-test", eval_ref_test,
                         "test-reference images (directory or pair manifest)")
        ->required();
    evaluate->add_option("--reference-train", eval_ref_train,
                         "train-reference images (directory or pair manifest)")
        ->required();
    evaluate->add_option("--out", eval_out, "output directory")->required();
    add_common_flags(evaluate, args);

    // report
    auto* report = app.add_subcommand("report", "regressions, growth curves, summary bundle");
    std::string rep_ref_traits, rep_gen_traits, rep_pairs, rep_fid, rep_train_pairs, rep_out;
    report->add_option("--reference-traits", rep_ref_traits, "reference traits CSV")->required();
    report->add_option("--generated-traits", rep_gen_traits, "generated traits CSV")->required();
    report->add_option("--pairs", rep_pairs, "test pair manifest directory")->required();
    report->add_option("--fid", rep_fid, "fid.json from evaluate (optional)");
    report->add_option("--train-pairs", rep_train_pairs,
                       "training manifest, used to flag stages without training pairs");
    report->add_option("--out", rep_out, "output directory")->required();
    add_common_flags(report, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (handle_dry_run(args)) return 0;
        RunConfig cfg = args.resolve();
        long workers = cfg.get_long("workers", 0);
        if (workers > 0) omp_set_num_threads(int(workers));

        if (synth->parsed()) cmds::cmd_synth(cfg, synth_out);
        if (pair->parsed()) cmds::cmd_pair(cfg, pair_records, pair_split, pair_visibility, pair_out);
        if (train->parsed()) cmds::cmd_train(cfg, train_pairs, train_out);
        if (predict->parsed()) cmds::cmd_predict(cfg, predict_model, predict_pairs, predict_out);
        if (segment->parsed()) {
            cmds::SegmentRole role;
            if (segment_role == "input")
                role = cmds::SegmentRole::Input;
            else if (segment_role == "reference")
                role = cmds::SegmentRole::Reference;
            else if (segment_role == "generated")
                role = cmds::SegmentRole::Generated;
            else
                throw growthcast::ConfigError("--role must be input, reference, or generated");
            cmds::cmd_segment(cfg, segment_pairs, role, segment_generated, segment_out);
        }
        if (evaluate->parsed())
            cmds::cmd_evaluate(cfg, eval_generated, eval_ref_test, eval_ref_train, eval_out);
        if (report->parsed())
            cmds::cmd_report(cfg, rep_ref_traits, rep_gen_traits, rep_pairs, rep_fid,
                             rep_train_pairs, rep_out);
        return 0;
    } catch (const growthcast::ConfigError& e) {
        std::cerr << "error: [config] " << e.what() << "\n";
        return 2;
    } catch (const growthcast::DataError& e) {
        std::cerr << "error: [data] " << e.what() << "\n";
        return 3;
    } catch (const growthcast::NumericError& e) {
        std::cerr << "error: [numeric] " << e.what() << "\n";
        return 4;
    } catch (const growthcast::BackendError& e) {
        std::cerr << "error: [backend] " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: [data] " << e.what() << "\n";
        return 3;
    }
}
