#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gazescreen/core.hpp"
#include "gazescreen/features.hpp"
#include "gazescreen/io.hpp"
#include "gazescreen/mlp.hpp"
#include "gazescreen/noise.hpp"
#include "gazescreen/rng.hpp"
#include "gazescreen/synth.hpp"
#include "gazescreen/viz.hpp"

namespace gazescreen {

// One-shot reproduction of the clean-vs-noised study on a synthetic cohort:
// synth -> clean features -> noised features -> zone distribution table ->
// two trainings -> curves + summary. Everything derives from one master
// seed; identical options give a byte-identical output directory.
struct ExperimentOptions {
    std::filesystem::path out_dir;
    std::uint64_t seed = 42;
    double sigma = 0.025;
    int n_per_group = 25;
    int epochs = 200;
    double learning_rate = 0.05;
    double test_fraction = 0.2;
};

struct ConditionOutcome {
    double final_train_accuracy = 0.0;
    double final_eval_accuracy = 0.0;
    double final_train_loss = 0.0;
    double final_eval_loss = 0.0;
    int epochs_to_95pct_of_final = 0;
};

struct ExperimentSummary {
    std::uint64_t seed = 0;
    double sigma = 0.0;
    int n_per_group = 0;
    ConditionOutcome clean;
    ConditionOutcome noised;
    double eyes_mean_asd_clean = 0.0;
    double eyes_mean_td_clean = 0.0;
    double eyes_ratio_asd_over_td = 0.0;
    double eyes_gap_clean = 0.0;
    double eyes_gap_noised = 0.0;
};

namespace experiment_detail {

// Master-seed derivation tags for the pipeline stages.
inline constexpr std::uint64_t kCohortTag = 0xC0;
inline constexpr std::uint64_t kNoiseTag = 0xA1;
inline constexpr std::uint64_t kSplitTag = 0x51;
inline constexpr std::uint64_t kInitTag = 0x17;

inline ConditionOutcome outcome_of(const LearningCurve& curve) {
    ConditionOutcome o;
    o.final_train_accuracy = curve.back().train_acc;
    o.final_eval_accuracy = curve.back().eval_acc;
    o.final_train_loss = curve.back().train_loss;
    o.final_eval_loss = curve.back().eval_loss;
    o.epochs_to_95pct_of_final = epochs_to_95_of_final(curve);
    return o;
}

}  // namespace experiment_detail

inline ExperimentSummary run_experiment(const ExperimentOptions& opts) {
    namespace fs = std::filesystem;
    const fs::path out = opts.out_dir;

    CohortSpec spec;
    spec.n_per_group = opts.n_per_group;
    spec.seed = rng::derive(opts.seed, experiment_detail::kCohortTag);
    const fs::path cohort_dir = out / "cohort";
    const CohortManifest manifest = generate_cohort(spec, cohort_dir);
    write_aoi_json(spec.aoi, out / "aoi.json");
    write_profiles_json(spec.td_profile, spec.asd_profile, out / "profiles.json");

    const std::uint64_t noise_seed = rng::derive(opts.seed, experiment_detail::kNoiseTag);
    std::vector<FeatureVector> clean_rows, noised_rows;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        const auto& entry = manifest.entries[i];
        const GazeRecording rec = read_gaze_csv(cohort_dir / entry.recording, entry.subject_id,
                                                entry.stimulus_id, entry.familiarity);
        FeatureVector clean = dwell_fractions(rec, spec.aoi);
        clean.set_label(entry.label);
        clean_rows.push_back(std::move(clean));

        const GazeRecording noisy =
            add_webcam_noise(rec, NoiseSpec{opts.sigma, rng::chain(noise_seed, i)});
        FeatureVector noised = dwell_fractions(noisy, spec.aoi);
        noised.set_label(entry.label);
        noised_rows.push_back(std::move(noised));
    }
    write_features_csv(clean_rows, out / "features_clean.csv");
    write_features_csv(noised_rows, out / "features_noised.csv");

    emit_zone_distribution_table(cohort_zone_means(clean_rows), cohort_zone_means(noised_rows),
                                 out / "zone_distribution.csv");

    // One stratified split, shared by both conditions via subject ids.
    const std::uint64_t split_seed = rng::derive(opts.seed, experiment_detail::kSplitTag);
    auto [clean_train, clean_eval] = split_stratified(clean_rows, opts.test_fraction, split_seed);
    std::set<std::string> train_ids;
    for (const auto& fv : clean_train) train_ids.insert(fv.subject_id());
    std::vector<FeatureVector> noised_train, noised_eval;
    for (const auto& fv : noised_rows) {
        (train_ids.count(fv.subject_id()) ? noised_train : noised_eval).push_back(fv);
    }

    MlpConfig cfg;
    cfg.learning_rate = opts.learning_rate;
    cfg.epochs = opts.epochs;
    cfg.init_seed = rng::derive(opts.seed, experiment_detail::kInitTag);
    auto [clean_model, clean_curve] = train(cfg, clean_train, clean_eval);
    auto [noised_model, noised_curve] = train(cfg, noised_train, noised_eval);

    save_model_json(clean_model, out / "model_clean.json");
    save_model_json(noised_model, out / "model_noised.json");
    emit_curves_csv({{"clean", clean_curve}, {"noised", noised_curve}}, out / "curves.csv");

    ExperimentSummary summary;
    summary.seed = opts.seed;
    summary.sigma = opts.sigma;
    summary.n_per_group = opts.n_per_group;
    summary.clean = experiment_detail::outcome_of(clean_curve);
    summary.noised = experiment_detail::outcome_of(noised_curve);

    const auto clean_stats = cohort_zone_means(clean_rows);
    const auto noised_stats = cohort_zone_means(noised_rows);
    const int eyes = static_cast<int>(ZoneLabel::Eyes);
    summary.eyes_mean_asd_clean = clean_stats.at(Label::ASD)[eyes].mean;
    summary.eyes_mean_td_clean = clean_stats.at(Label::TD)[eyes].mean;
    summary.eyes_ratio_asd_over_td = summary.eyes_mean_asd_clean / summary.eyes_mean_td_clean;
    summary.eyes_gap_clean =
        std::abs(clean_stats.at(Label::ASD)[eyes].mean - clean_stats.at(Label::TD)[eyes].mean);
    summary.eyes_gap_noised =
        std::abs(noised_stats.at(Label::ASD)[eyes].mean - noised_stats.at(Label::TD)[eyes].mean);

    nlohmann::ordered_json doc;
    doc["seed"] = summary.seed;
    doc["sigma"] = summary.sigma;
    doc["n_per_group"] = summary.n_per_group;
    doc["rng_algorithm"] = rng::kAlgorithm;
    doc["epochs"] = opts.epochs;
    doc["learning_rate"] = opts.learning_rate;
    doc["test_fraction"] = opts.test_fraction;
    auto condition_doc = [](const ConditionOutcome& o) {
        nlohmann::ordered_json c;
        c["final_train_accuracy"] = o.final_train_accuracy;
        c["final_eval_accuracy"] = o.final_eval_accuracy;
        c["final_train_loss"] = o.final_train_loss;
        c["final_eval_loss"] = o.final_eval_loss;
        c["epochs_to_95pct_of_final"] = o.epochs_to_95pct_of_final;
        return c;
    };
    doc["clean"] = condition_doc(summary.clean);
    doc["noised"] = condition_doc(summary.noised);
    nlohmann::ordered_json eyes_doc;
    eyes_doc["clean_mean_asd"] = summary.eyes_mean_asd_clean;
    eyes_doc["clean_mean_td"] = summary.eyes_mean_td_clean;
    eyes_doc["ratio_asd_over_td"] = summary.eyes_ratio_asd_over_td;
    eyes_doc["clean_gap"] = summary.eyes_gap_clean;
    eyes_doc["noised_gap"] = summary.eyes_gap_noised;
    doc["eyes_fraction"] = eyes_doc;
    atomic_write_file(out / "summary.json", doc.dump(2) + "\n");

    return summary;
}

}  // namespace gazescreen
