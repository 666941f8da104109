#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazescreen/core.hpp"
#include "gazescreen/errors.hpp"
#include "gazescreen/io.hpp"
#include "gazescreen/rng.hpp"

namespace gazescreen {

// Fully connected binary classifier over the 5 dwell fractions:
// 5 -> hidden... -> 1, rectifier on hidden layers, logistic sigmoid output,
// mean binary cross-entropy loss. Label convention: ASD = 1 = P(output).

struct MlpConfig {
    std::vector<int> hidden_sizes = {8};
    double learning_rate = 0.05;
    int epochs = 200;
    int batch_size = 0;  // 0 = full batch
    std::uint64_t init_seed = 0;
    double l2 = 0.0;
};

inline void validate_config(const MlpConfig& cfg) {
    for (int h : cfg.hidden_sizes) {
        if (h < 1) throw Error("hidden layer sizes must be positive");
    }
    if (!(cfg.learning_rate > 0.0)) throw Error("learning_rate must be positive");
    if (cfg.epochs < 1) throw Error("epochs must be positive");
    if (cfg.batch_size < 0) throw Error("batch_size must be >= 0 (0 = full batch)");
    if (!(cfg.l2 >= 0.0)) throw Error("l2 must be >= 0");
}

struct MlpLayer {
    int in = 0;
    int out = 0;
    std::vector<double> weights;  // row-major, out x in
    std::vector<double> biases;   // out
};

struct MlpModel {
    MlpConfig config;
    std::vector<MlpLayer> layers;

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.weights.size() + l.biases.size();
        return n;
    }
};

struct EpochRecord {
    int epoch = 0;  // 1-based, contiguous
    double train_loss = 0.0;
    double train_acc = 0.0;
    double eval_loss = 0.0;
    double eval_acc = 0.0;
};

using LearningCurve = std::vector<EpochRecord>;

struct EvalResult {
    double accuracy = 0.0;
    double loss = 0.0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Glorot-uniform initialization: weights ~ U(+-sqrt(6/(fan_in+fan_out))),
// biases zero; deterministic in init_seed.
inline MlpModel init_model(const MlpConfig& cfg) {
    validate_config(cfg);
    MlpModel model;
    model.config = cfg;
    std::vector<int> dims;
    dims.push_back(static_cast<int>(kZoneCount));
    dims.insert(dims.end(), cfg.hidden_sizes.begin(), cfg.hidden_sizes.end());
    dims.push_back(1);
    rng::CounterStream stream(cfg.init_seed, rng::kWeightInit);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        MlpLayer layer;
        layer.in = dims[l];
        layer.out = dims[l + 1];
        const double limit = std::sqrt(6.0 / (layer.in + layer.out));
        layer.weights.resize(static_cast<std::size_t>(layer.in) * layer.out);
        for (auto& w : layer.weights) w = (2.0 * stream.next_u01() - 1.0) * limit;
        layer.biases.assign(layer.out, 0.0);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

namespace mlp_detail {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Forward pass keeping pre-activations per layer for backprop.
// activations[0] is the input; pre[l] the affine output of layer l.
struct ForwardTrace {
    std::vector<std::vector<double>> activations;
    std::vector<std::vector<double>> pre;
    double probability = 0.0;
};

inline ForwardTrace forward_trace(const MlpModel& model, const double* x) {
    ForwardTrace trace;
    trace.activations.emplace_back(x, x + model.layers.front().in);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const MlpLayer& layer = model.layers[l];
        std::vector<double> z(layer.out, 0.0);
        const auto& a = trace.activations.back();
        for (int o = 0; o < layer.out; ++o) {
            double acc = layer.biases[o];
            const double* row = layer.weights.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) acc += row[i] * a[i];
            z[o] = acc;
        }
        trace.pre.push_back(z);
        if (l + 1 < model.layers.size()) {
            for (auto& v : z) v = std::max(v, 0.0);
            trace.activations.push_back(std::move(z));
        } else {
            trace.probability = sigmoid(z[0]);
        }
    }
    return trace;
}

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    explicit Gradients(const MlpModel& model) {
        for (const auto& l : model.layers) {
            weights.emplace_back(l.weights.size(), 0.0);
            biases.emplace_back(l.biases.size(), 0.0);
        }
    }
};

inline void check_features_finite(const std::array<double, kZoneCount>& f) {
    for (double v : f) {
        if (!std::isfinite(v)) throw NonFiniteInput("non-finite feature value");
    }
}

inline double require_label(const FeatureVector& fv) {
    if (!fv.label()) throw Error("feature vector for " + fv.subject_id() + " has no label");
    return *fv.label() == Label::ASD ? 1.0 : 0.0;
}

}  // namespace mlp_detail

inline double forward(const MlpModel& model, const std::array<double, kZoneCount>& features) {
    mlp_detail::check_features_finite(features);
    return mlp_detail::forward_trace(model, features.data()).probability;
}

// Mean binary cross-entropy (+ L2/2 on weights) and its gradients by
// reverse-mode accumulation. Probabilities are clamped to
// (1e-12, 1 - 1e-12) before the logs.
inline std::pair<double, mlp_detail::Gradients> loss_and_gradients(
    const MlpModel& model, const std::vector<FeatureVector>& batch) {
    if (batch.empty()) throw EmptyBatch("empty batch");
    constexpr double kEps = 1e-12;
    mlp_detail::Gradients grads(model);
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    const std::size_t n_layers = model.layers.size();
    for (const FeatureVector& fv : batch) {
        mlp_detail::check_features_finite(fv.fractions());
        const double y = mlp_detail::require_label(fv);
        auto trace = mlp_detail::forward_trace(model, fv.fractions().data());
        const double p = std::clamp(trace.probability, kEps, 1.0 - kEps);
        loss += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p)) * inv_n;

        // delta for the output layer; propagate backwards.
        std::vector<double> delta{(trace.probability - y) * inv_n};
        for (std::size_t l = n_layers; l-- > 0;) {
            const MlpLayer& layer = model.layers[l];
            const auto& a_in = trace.activations[l];
            for (int o = 0; o < layer.out; ++o) {
                grads.biases[l][o] += delta[o];
                double* grow = grads.weights[l].data() + static_cast<std::size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) grow[i] += delta[o] * a_in[i];
            }
            if (l == 0) break;
            std::vector<double> prev(layer.in, 0.0);
            for (int i = 0; i < layer.in; ++i) {
                if (trace.pre[l - 1][i] <= 0.0) continue;  // rectifier gate
                double acc = 0.0;
                for (int o = 0; o < layer.out; ++o) {
                    acc += delta[o] * layer.weights[static_cast<std::size_t>(o) * layer.in + i];
                }
                prev[i] = acc;
            }
            delta = std::move(prev);
        }
    }
    if (model.config.l2 > 0.0) {
        double sq = 0.0;
        for (std::size_t l = 0; l < n_layers; ++l) {
            for (std::size_t k = 0; k < model.layers[l].weights.size(); ++k) {
                sq += model.layers[l].weights[k] * model.layers[l].weights[k];
                grads.weights[l][k] += model.config.l2 * model.layers[l].weights[k];
            }
        }
        loss += 0.5 * model.config.l2 * sq;
    }
    return {loss, std::move(grads)};
}

inline EvalResult evaluate(const MlpModel& model, const std::vector<FeatureVector>& set) {
    if (set.empty()) throw EmptyBatch("empty evaluation set");
    constexpr double kEps = 1e-12;
    EvalResult r;
    double loss = 0.0;
    for (const FeatureVector& fv : set) {
        const double y = mlp_detail::require_label(fv);
        const double p = forward(model, fv.fractions());
        const double pc = std::clamp(p, kEps, 1.0 - kEps);
        loss += -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
        const bool predicted_asd = p >= 0.5;  // ties go to ASD
        const bool is_asd = y > 0.5;
        if (predicted_asd && is_asd) ++r.tp;
        else if (predicted_asd && !is_asd) ++r.fp;
        else if (!predicted_asd && !is_asd) ++r.tn;
        else ++r.fn;
    }
    r.loss = loss / static_cast<double>(set.size());
    r.accuracy = static_cast<double>(r.tp + r.tn) / static_cast<double>(set.size());
    return r;
}

// Gradient-descent training; deterministic given config and data order.
// Metrics are recorded after each epoch's update.
inline std::pair<MlpModel, LearningCurve> train(const MlpConfig& cfg,
                                                const std::vector<FeatureVector>& train_set,
                                                const std::vector<FeatureVector>& eval_set) {
    if (train_set.empty()) throw EmptyBatch("empty training set");
    if (eval_set.empty()) throw EmptyBatch("empty evaluation set");
    for (const auto& fv : train_set) mlp_detail::require_label(fv);

    MlpModel model = init_model(cfg);
    LearningCurve curve;
    curve.reserve(static_cast<std::size_t>(cfg.epochs));

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng::CounterStream shuffle_stream(cfg.init_seed, rng::kShuffle);

    const std::size_t batch =
        cfg.batch_size == 0 ? train_set.size()
                            : std::min<std::size_t>(cfg.batch_size, train_set.size());
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.batch_size != 0) {
            for (std::size_t i = order.size(); i > 1; --i) {
                std::swap(order[i - 1], order[shuffle_stream.next_below(i)]);
            }
        }
        for (std::size_t start = 0; start < order.size(); start += batch) {
            std::vector<FeatureVector> slice;
            slice.reserve(batch);
            for (std::size_t k = start; k < std::min(start + batch, order.size()); ++k) {
                slice.push_back(train_set[order[k]]);
            }
            auto [loss, grads] = loss_and_gradients(model, slice);
            if (!std::isfinite(loss)) {
                throw DivergedLoss("non-finite loss at epoch " + std::to_string(epoch));
            }
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                auto& layer = model.layers[l];
                for (std::size_t k = 0; k < layer.weights.size(); ++k) {
                    layer.weights[k] -= cfg.learning_rate * grads.weights[l][k];
                }
                for (std::size_t k = 0; k < layer.biases.size(); ++k) {
                    layer.biases[k] -= cfg.learning_rate * grads.biases[l][k];
                }
            }
        }
        const EvalResult on_train = evaluate(model, train_set);
        const EvalResult on_eval = evaluate(model, eval_set);
        if (!std::isfinite(on_train.loss) || !std::isfinite(on_eval.loss)) {
            throw DivergedLoss("non-finite loss at epoch " + std::to_string(epoch));
        }
        curve.push_back(EpochRecord{epoch, on_train.loss, on_train.accuracy, on_eval.loss,
                                    on_eval.accuracy});
    }
    return {std::move(model), std::move(curve)};
}

// First epoch reaching 95% of the final train accuracy.
inline int epochs_to_95_of_final(const LearningCurve& curve) {
    if (curve.empty()) throw EmptyInput("empty learning curve");
    const double target = 0.95 * curve.back().train_acc;
    for (const auto& rec : curve) {
        if (rec.train_acc >= target) return rec.epoch;
    }
    return curve.back().epoch;
}

// Per-class proportional split with a seeded shuffle; class ratios preserved
// within one sample and both output sides keep at least one member per class.
inline std::pair<std::vector<FeatureVector>, std::vector<FeatureVector>> split_stratified(
    const std::vector<FeatureVector>& features, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error("test_fraction must lie strictly between 0 and 1");
    }
    std::vector<std::size_t> asd, td;
    for (std::size_t i = 0; i < features.size(); ++i) {
        (mlp_detail::require_label(features[i]) > 0.5 ? asd : td).push_back(i);
    }
    if (asd.size() < 2 || td.size() < 2) {
        throw InsufficientClassMembers("each class needs at least 2 members to split");
    }
    std::pair<std::vector<FeatureVector>, std::vector<FeatureVector>> out;
    std::uint64_t class_tag = 0;
    for (auto* idx : {&td, &asd}) {
        rng::CounterStream stream(rng::derive(seed, class_tag++), rng::kShuffle);
        for (std::size_t i = idx->size(); i > 1; --i) {
            std::swap((*idx)[i - 1], (*idx)[stream.next_below(i)]);
        }
        const auto n = static_cast<double>(idx->size());
        std::size_t n_test = static_cast<std::size_t>(std::llround(n * test_fraction));
        n_test = std::clamp<std::size_t>(n_test, 1, idx->size() - 1);
        for (std::size_t k = 0; k < idx->size(); ++k) {
            (k < n_test ? out.second : out.first).push_back(features[(*idx)[k]]);
        }
    }
    return out;  // (train, test)
}

// ---------------------------------------------------------------------------
// Model document (JSON) and learning-curve CSV.
// ---------------------------------------------------------------------------

inline std::string model_json_string(const MlpModel& model) {
    nlohmann::ordered_json doc;
    doc["format"] = "gazescreen-mlp";
    nlohmann::ordered_json cfg;
    cfg["hidden_sizes"] = model.config.hidden_sizes;
    cfg["learning_rate"] = model.config.learning_rate;
    cfg["epochs"] = model.config.epochs;
    cfg["batch_size"] = model.config.batch_size;
    cfg["init_seed"] = model.config.init_seed;
    cfg["l2"] = model.config.l2;
    doc["config"] = cfg;
    std::vector<int> dims{static_cast<int>(kZoneCount)};
    for (const auto& l : model.layers) dims.push_back(l.out);
    doc["layer_dims"] = dims;
    doc["layers"] = nlohmann::ordered_json::array();
    for (const auto& l : model.layers) {
        nlohmann::ordered_json layer_doc;
        layer_doc["weights"] = nlohmann::ordered_json::array();
        for (int o = 0; o < l.out; ++o) {
            layer_doc["weights"].push_back(std::vector<double>(
                l.weights.begin() + static_cast<std::ptrdiff_t>(o) * l.in,
                l.weights.begin() + static_cast<std::ptrdiff_t>(o + 1) * l.in));
        }
        layer_doc["biases"] = l.biases;
        doc["layers"].push_back(layer_doc);
    }
    return doc.dump(2) + "\n";
}

inline void save_model_json(const MlpModel& model, const std::filesystem::path& path) {
    atomic_write_file(path, model_json_string(model));
}

inline MlpModel load_model_json(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaViolation(path.string() + ": invalid JSON: " + e.what());
    }
    try {
        MlpModel model;
        const auto& cfg = doc.at("config");
        model.config.hidden_sizes = cfg.at("hidden_sizes").get<std::vector<int>>();
        model.config.learning_rate = cfg.at("learning_rate").get<double>();
        model.config.epochs = cfg.at("epochs").get<int>();
        model.config.batch_size = cfg.at("batch_size").get<int>();
        model.config.init_seed = cfg.at("init_seed").get<std::uint64_t>();
        model.config.l2 = cfg.at("l2").get<double>();
        const auto dims = doc.at("layer_dims").get<std::vector<int>>();
        if (dims.size() < 2 || dims.front() != static_cast<int>(kZoneCount) || dims.back() != 1) {
            throw SchemaViolation(path.string() + ": layer_dims must chain 5 -> ... -> 1");
        }
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            MlpLayer layer;
            layer.in = dims[l];
            layer.out = dims[l + 1];
            const auto& layer_doc = doc.at("layers").at(l);
            for (const auto& row : layer_doc.at("weights")) {
                const auto vals = row.get<std::vector<double>>();
                if (static_cast<int>(vals.size()) != layer.in) {
                    throw SchemaViolation(path.string() + ": weight row width mismatch");
                }
                layer.weights.insert(layer.weights.end(), vals.begin(), vals.end());
            }
            layer.biases = layer_doc.at("biases").get<std::vector<double>>();
            if (static_cast<int>(layer.biases.size()) != layer.out ||
                layer.weights.size() != static_cast<std::size_t>(layer.in) * layer.out) {
                throw SchemaViolation(path.string() + ": layer shape mismatch");
            }
            for (double w : layer.weights) {
                if (!std::isfinite(w)) throw SchemaViolation(path.string() + ": non-finite weight");
            }
            model.layers.push_back(std::move(layer));
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaViolation(path.string() + ": bad model document: " + e.what());
    }
}

inline constexpr const char* kCurveCsvHeader = "epoch,train_loss,train_acc,eval_loss,eval_acc";

inline std::string curve_csv_string(const LearningCurve& curve) {
    std::string out = kCurveCsvHeader;
    out += '\n';
    char buf[192];
    for (const auto& r : curve) {
        std::snprintf(buf, sizeof(buf), "%d,%.9f,%.9f,%.9f,%.9f\n", r.epoch, r.train_loss,
                      r.train_acc, r.eval_loss, r.eval_acc);
        out += buf;
    }
    return out;
}

inline void write_curve_csv(const LearningCurve& curve, const std::filesystem::path& path) {
    atomic_write_file(path, curve_csv_string(curve));
}

}  // namespace gazescreen
