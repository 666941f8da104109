// Command-line front end for the gaze-screening toolkit. Exit codes:
// 0 success, 1 runtime/data failure, 2 usage error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gazescreen/core.hpp"
#include "gazescreen/experiment.hpp"
#include "gazescreen/features.hpp"
#include "gazescreen/fixation.hpp"
#include "gazescreen/io.hpp"
#include "gazescreen/mlp.hpp"
#include "gazescreen/noise.hpp"
#include "gazescreen/rng.hpp"
#include "gazescreen/synth.hpp"
#include "gazescreen/viz.hpp"

namespace fs = std::filesystem;
using namespace gazescreen;

namespace {

// Seed resolution: explicit flag, then GAZESCREEN_SEED, then 42.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("GAZESCREEN_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            throw CLI::ValidationError("GAZESCREEN_SEED", "not an unsigned integer");
        }
        return v;
    }
    return 42;
}

std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

struct SynthArgs {
    std::string out;
    int n_per_group = 25;
    std::optional<std::uint64_t> seed;
    std::string profiles;
    double duration_ms = 120000.0;
};

struct FeaturesArgs {
    std::string manifest;
    std::string aoi;
    std::string out;
    double sigma = 0.0;
    std::optional<std::uint64_t> seed;
};

struct FixationsArgs {
    std::string in;
    std::string algo;
    std::string out;
    double dispersion = IdtParams{}.dispersion_threshold;
    double min_dur = IdtParams{}.min_duration_ms;
    double velocity = IvtParams{}.velocity_threshold;
};

struct RenderArgs {
    std::string in;
    std::string aoi;
    std::string out;
    double kernel_sigma_px = 15.0;
    double dispersion = IdtParams{}.dispersion_threshold;
    double min_dur = IdtParams{}.min_duration_ms;
};

struct TrainArgs {
    std::string features;
    std::string out_model;
    std::string curves;
    int epochs = MlpConfig{}.epochs;
    double lr = MlpConfig{}.learning_rate;
    std::vector<int> hidden = MlpConfig{}.hidden_sizes;
    std::optional<std::uint64_t> seed;
    double test_fraction = 0.2;
    double l2 = 0.0;
    int batch_size = 0;
};

struct EvalArgs {
    std::string model;
    std::string features;
};

struct ExperimentArgs {
    std::string out;
    std::optional<std::uint64_t> seed;
    double sigma = 0.025;
    int n_per_group = 25;
};

int run_synth(const SynthArgs& args) {
    CohortSpec spec;
    spec.n_per_group = args.n_per_group;
    spec.seed = resolve_seed(args.seed);
    spec.duration_ms = args.duration_ms;
    if (!args.profiles.empty()) {
        auto [td, asd] = read_profiles_json(args.profiles);
        spec.td_profile = td;
        spec.asd_profile = asd;
    }
    const fs::path out_dir = args.out;
    generate_cohort(spec, out_dir);
    write_aoi_json(spec.aoi, out_dir / "aoi.json");
    write_profiles_json(spec.td_profile, spec.asd_profile, out_dir / "profiles.json");
    std::cout << (out_dir / "manifest.json").string() << "\n";
    return 0;
}

int run_features(const FeaturesArgs& args) {
    const fs::path manifest_path = args.manifest;
    const CohortManifest manifest = read_manifest_json(manifest_path);
    const AoiSet aoi = read_aoi_json(args.aoi);
    const std::uint64_t seed = resolve_seed(args.seed);
    std::vector<FeatureVector> rows;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& entry = manifest.entries[i];
        try {
            GazeRecording rec = read_gaze_csv(manifest_path.parent_path() / entry.recording,
                                              entry.subject_id, entry.stimulus_id,
                                              entry.familiarity);
            if (args.sigma > 0.0) {
                rec = add_webcam_noise(rec, NoiseSpec{args.sigma, rng::derive(seed, i)});
            }
            FeatureVector fv = dwell_fractions(rec, aoi);
            fv.set_label(entry.label);
            rows.push_back(std::move(fv));
        } catch (const Error& e) {
            throw Error("entry '" + entry.subject_id + "': " + e.what());
        }
    }
    write_features_csv(rows, args.out);
    std::cout << rows.size() << " feature rows -> " << args.out << "\n";
    return 0;
}

int run_fixations(const FixationsArgs& args) {
    const GazeRecording rec = read_gaze_csv(args.in);
    std::vector<Fixation> fixes;
    if (args.algo == "idt") {
        fixes = detect_fixations_idt(rec, IdtParams{args.dispersion, args.min_dur});
    } else {
        fixes = detect_fixations_ivt(rec, IvtParams{args.velocity, args.min_dur});
    }
    const std::string csv = fixations_csv_string(fixes);
    if (args.out.empty()) {
        std::cout << csv;
    } else {
        atomic_write_file(args.out, csv);
        std::cout << fixes.size() << " fixations -> " << args.out << "\n";
    }
    return 0;
}

int run_render_heatmap(const RenderArgs& args) {
    const GazeRecording rec = read_gaze_csv(args.in);
    render_heatmap(rec, rec.geometry, args.kernel_sigma_px, args.out);
    std::cout << args.out << "\n";
    return 0;
}

int run_render_scanpath(const RenderArgs& args) {
    const GazeRecording rec = read_gaze_csv(args.in);
    const AoiSet aoi = read_aoi_json(args.aoi);
    const auto fixes = detect_fixations_idt(rec, IdtParams{args.dispersion, args.min_dur});
    render_scanpath(fixes, aoi, rec.geometry, args.out);
    std::cout << args.out << "\n";
    return 0;
}

int run_train(const TrainArgs& args) {
    const auto rows = read_features_csv(args.features);
    for (const auto& fv : rows) {
        if (!fv.label()) throw Error("unlabeled row for subject '" + fv.subject_id() + "'");
    }
    const std::uint64_t seed = resolve_seed(args.seed);
    auto [train_set, eval_set] = split_stratified(rows, args.test_fraction, seed);
    MlpConfig cfg;
    cfg.hidden_sizes = args.hidden;
    cfg.learning_rate = args.lr;
    cfg.epochs = args.epochs;
    cfg.batch_size = args.batch_size;
    cfg.l2 = args.l2;
    cfg.init_seed = seed;
    auto [model, curve] = train(cfg, train_set, eval_set);
    save_model_json(model, args.out_model);
    write_curve_csv(curve, args.curves);
    std::cout << "final train accuracy " << fmt4(curve.back().train_acc) << "\n"
              << "final eval accuracy " << fmt4(curve.back().eval_acc) << "\n";
    return 0;
}

int run_eval(const EvalArgs& args) {
    const MlpModel model = load_model_json(args.model);
    const auto rows = read_features_csv(args.features);
    const EvalResult r = evaluate(model, rows);
    std::cout << "accuracy " << fmt4(r.accuracy) << "\n"
              << "loss " << fmt4(r.loss) << "\n"
              << "tp " << r.tp << " fp " << r.fp << " tn " << r.tn << " fn " << r.fn << "\n";
    return 0;
}

int run_experiment_cmd(const ExperimentArgs& args) {
    ExperimentOptions opts;
    opts.out_dir = args.out;
    opts.seed = resolve_seed(args.seed);
    opts.sigma = args.sigma;
    opts.n_per_group = args.n_per_group;
    const ExperimentSummary s = run_experiment(opts);
    std::cout << "rng " << rng::kAlgorithm << "\n"
              << "clean final train accuracy " << fmt4(s.clean.final_train_accuracy) << "\n"
              << "noised final train accuracy " << fmt4(s.noised.final_train_accuracy) << "\n"
              << "epochs to 95% of final (clean) " << s.clean.epochs_to_95pct_of_final << "\n"
              << "epochs to 95% of final (noised) " << s.noised.epochs_to_95pct_of_final << "\n"
              << "eyes fraction ratio (ASD/TD) " << fmt4(s.eyes_ratio_asd_over_td) << "\n"
              << (opts.out_dir / "summary.json").string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gaze screening toolkit: synthetic cohorts, dwell features, webcam-noise "
                 "simulation, fixation detection, MLP training, and the clean-vs-noised "
                 "experiment"};
    app.require_subcommand(1);

    auto strict_unit_interval = [](const std::string& v) -> std::string {
        const double x = std::atof(v.c_str());
        if (!(x > 0.0 && x < 1.0)) return "must lie strictly between 0 and 1";
        return {};
    };

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a labeled synthetic cohort");
    synth->add_option("--out", synth_args.out, "output directory")->required();
    synth->add_option("--n-per-group", synth_args.n_per_group, "subjects per group")
        ->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_args.seed, "master seed (falls back to GAZESCREEN_SEED)");
    synth->add_option("--profiles", synth_args.profiles, "profile overrides document");
    synth->add_option("--duration-ms", synth_args.duration_ms, "recording length in ms")
        ->check(CLI::PositiveNumber);

    FeaturesArgs features_args;
    auto* features = app.add_subcommand("features", "dwell-time features for a cohort");
    features->add_option("--manifest", features_args.manifest, "cohort manifest")->required();
    features->add_option("--aoi", features_args.aoi, "AOI document")->required();
    features->add_option("--out", features_args.out, "features CSV to write")->required();
    features->add_option("--sigma", features_args.sigma, "webcam noise sigma (0 = clean)")
        ->check(CLI::NonNegativeNumber);
    features->add_option("--seed", features_args.seed, "noise seed");

    FixationsArgs fixations_args;
    auto* fixations = app.add_subcommand("fixations", "detect fixations in a recording");
    fixations->add_option("--in", fixations_args.in, "gaze CSV")->required();
    fixations->add_option("--algo", fixations_args.algo, "idt or ivt")
        ->required()
        ->check(CLI::IsMember({"idt", "ivt"}));
    fixations->add_option("--out", fixations_args.out, "fixation CSV (stdout if omitted)");
    fixations->add_option("--dispersion", fixations_args.dispersion, "I-DT dispersion threshold")
        ->check(CLI::PositiveNumber);
    fixations->add_option("--min-dur", fixations_args.min_dur, "minimum duration in ms")
        ->check(CLI::PositiveNumber);
    fixations->add_option("--velocity", fixations_args.velocity,
                          "I-VT velocity threshold (fractions/s)")
        ->check(CLI::PositiveNumber);

    RenderArgs render_args;
    auto* render = app.add_subcommand("render", "render gaze visualizations");
    render->require_subcommand(1);
    auto* heatmap = render->add_subcommand("heatmap", "grayscale gaze heatmap (PGM)");
    heatmap->add_option("--in", render_args.in, "gaze CSV")->required();
    heatmap->add_option("--out", render_args.out, "image path")->required();
    heatmap->add_option("--kernel-sigma-px", render_args.kernel_sigma_px, "kernel sigma in px")
        ->check(CLI::PositiveNumber);
    auto* scanpath = render->add_subcommand("scanpath", "fixation scanpath (SVG)");
    scanpath->add_option("--in", render_args.in, "gaze CSV")->required();
    scanpath->add_option("--aoi", render_args.aoi, "AOI document")->required();
    scanpath->add_option("--out", render_args.out, "SVG path")->required();
    scanpath->add_option("--dispersion", render_args.dispersion, "I-DT dispersion threshold")
        ->check(CLI::PositiveNumber);
    scanpath->add_option("--min-dur", render_args.min_dur, "minimum duration in ms")
        ->check(CLI::PositiveNumber);

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train the classifier on a features table");
    train_cmd->add_option("--features", train_args.features, "labeled features CSV")->required();
    train_cmd->add_option("--out-model", train_args.out_model, "model document to write")
        ->required();
    train_cmd->add_option("--curves", train_args.curves, "learning-curve CSV to write")
        ->required();
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--lr", train_args.lr, "learning rate")->check(CLI::PositiveNumber);
    train_cmd->add_option("--hidden", train_args.hidden, "hidden layer sizes")
        ->delimiter(',');
    train_cmd->add_option("--seed", train_args.seed, "split/init seed");
    train_cmd->add_option("--test-fraction", train_args.test_fraction, "held-out fraction")
        ->check(CLI::Validator(strict_unit_interval, "UNIT", "open unit interval"));
    train_cmd->add_option("--l2", train_args.l2, "L2 penalty")->check(CLI::NonNegativeNumber);
    train_cmd->add_option("--batch-size", train_args.batch_size, "mini-batch size (0 = full)")
        ->check(CLI::NonNegativeNumber);

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a saved model on a features table");
    eval_cmd->add_option("--model", eval_args.model, "model document")->required();
    eval_cmd->add_option("--features", eval_args.features, "labeled features CSV")->required();

    ExperimentArgs experiment_args;
    auto* experiment_cmd =
        app.add_subcommand("experiment", "one-shot clean-vs-noised reproduction");
    experiment_cmd->add_option("--out", experiment_args.out, "output directory")->required();
    experiment_cmd->add_option("--seed", experiment_args.seed, "master seed");
    experiment_cmd->add_option("--sigma", experiment_args.sigma, "webcam noise sigma")
        ->check(CLI::NonNegativeNumber);
    experiment_cmd->add_option("--n-per-group", experiment_args.n_per_group, "subjects per group")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*synth) return run_synth(synth_args);
        if (*features) return run_features(features_args);
        if (*fixations) return run_fixations(fixations_args);
        if (*heatmap) return run_render_heatmap(render_args);
        if (*scanpath) return run_render_scanpath(render_args);
        if (*train_cmd) return run_train(train_args);
        if (*eval_cmd) return run_eval(eval_args);
        if (*experiment_cmd) return run_experiment_cmd(experiment_args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
