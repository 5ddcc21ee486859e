#include "morphobpe/quality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "morphobpe/errors.hpp"
#include "morphobpe/hash.hpp"
#include "morphobpe/rng.hpp"
#include "morphobpe/utf8.hpp"

namespace morphobpe::quality {

using nlohmann::json;

FeatureVector featurize(std::string_view text) {
    // Scalar offsets of the first kMaxChars characters.
    std::vector<std::size_t> offsets;
    std::size_t i = 0;
    while (i < text.size() && offsets.size() < kMaxChars) {
        offsets.push_back(i);
        utf8::decode_at(text, i);
    }
    offsets.push_back(i);
    const std::size_t n_chars = offsets.size() - 1;

    std::unordered_map<std::uint32_t, double> counts;
    for (std::size_t n = 1; n <= 3; ++n) {
        if (n_chars < n) break;
        for (std::size_t s = 0; s + n <= n_chars; ++s) {
            const auto gram = text.substr(offsets[s], offsets[s + n] - offsets[s]);
            // Seed per n so "ab" as a bigram and as two unigrams differ.
            const std::uint64_t h = fnv1a64(gram, 0xcbf29ce484222325ULL ^ (n * 0x9E3779B9ULL));
            counts[static_cast<std::uint32_t>(h % kDimension)] += 1.0;
        }
    }

    FeatureVector fv(counts.begin(), counts.end());
    std::sort(fv.begin(), fv.end());
    double norm2 = 0.0;
    for (const auto& [idx, w] : fv) norm2 += w * w;
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& [idx, w] : fv) w *= inv;
    }
    return fv;
}

namespace {

inline double sigmoid(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
inline double log1pexp(double z) {
    if (z > 0.0) return z + std::log1p(std::exp(-z));
    return std::log1p(std::exp(z));
}

}  // namespace

double predict(const std::vector<double>& weights, double bias, const FeatureVector& fv) {
    double z = bias;
    for (const auto& [idx, w] : fv) z += weights[idx] * w;
    return sigmoid(z);
}

LossGrad logistic_loss_and_grad(const std::vector<double>& weights, double bias,
                                double l2_lambda,
                                const std::vector<const LabeledExample*>& batch) {
    LossGrad out;
    out.grad_w.assign(weights.size(), 0.0);
    if (batch.empty()) return out;

    const double inv_n = 1.0 / static_cast<double>(batch.size());
    for (const LabeledExample* ex : batch) {
        double z = bias;
        for (const auto& [idx, w] : ex->features) z += weights[idx] * w;
        // -t*log(p) - (1-t)*log(1-p) == log1pexp(z) - t*z
        out.loss += (log1pexp(z) - ex->target * z) * inv_n;
        const double residual = (sigmoid(z) - ex->target) * inv_n;
        for (const auto& [idx, w] : ex->features) out.grad_w[idx] += residual * w;
        out.grad_b += residual;
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        norm2 += weights[i] * weights[i];
        out.grad_w[i] += l2_lambda * weights[i];
    }
    out.loss += 0.5 * l2_lambda * norm2;
    return out;
}

std::pair<QualityModel, TrainStats> train_quality(const std::vector<pipeline::Document>& pos,
                                                  const std::vector<pipeline::Document>& neg,
                                                  const QualityTrainOptions& opts) {
    if (pos.empty() || neg.empty()) {
        throw TrainingError("quality training needs non-empty positive and negative streams");
    }
    if (opts.epochs < 0 || opts.batch_size < 1) {
        throw ConfigError("quality training: epochs must be >= 0 and batch_size >= 1");
    }

    std::vector<LabeledExample> examples;
    examples.reserve(pos.size() + neg.size());
    for (const auto& d : pos) examples.push_back({featurize(d.body), 1.0});
    for (const auto& d : neg) examples.push_back({featurize(d.body), 0.0});

    QualityModel model;
    model.l2_lambda = opts.l2_lambda;
    TrainStats stats;

    SplitMix64 rng(opts.seed);
    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next_below(order.size() - i));
            std::swap(order[i], order[j]);
        }
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t off = 0; off < order.size();
             off += static_cast<std::size_t>(opts.batch_size)) {
            std::vector<const LabeledExample*> batch;
            const std::size_t hi =
                std::min(order.size(), off + static_cast<std::size_t>(opts.batch_size));
            for (std::size_t k = off; k < hi; ++k) batch.push_back(&examples[order[k]]);

            const LossGrad lg =
                logistic_loss_and_grad(model.weights, model.bias, model.l2_lambda, batch);
            if (!std::isfinite(lg.loss)) {
                throw TrainingError(
                    "quality training diverged (non-finite loss); lower learning_rate");
            }
            for (std::size_t w = 0; w < model.weights.size(); ++w) {
                model.weights[w] -= opts.learning_rate * lg.grad_w[w];
            }
            model.bias -= opts.learning_rate * lg.grad_b;
            epoch_loss += lg.loss;
            ++batches;
        }
        stats.epoch_losses.push_back(batches > 0 ? epoch_loss / static_cast<double>(batches)
                                                 : 0.0);
    }

    // Final loss over everything, with the fitted weights.
    std::vector<const LabeledExample*> all;
    all.reserve(examples.size());
    for (const auto& ex : examples) all.push_back(&ex);
    stats.final_loss =
        logistic_loss_and_grad(model.weights, model.bias, model.l2_lambda, all).loss;
    return {std::move(model), std::move(stats)};
}

double score(const QualityModel& model, const pipeline::Document& doc) {
    const double p = predict(model.weights, model.bias, featurize(doc.body));
    return std::clamp(p, 1e-15, 1.0 - 1e-15);
}

void save(const QualityModel& model, std::ostream& out) {
    json j;
    j["version"] = 1;
    j["dimension"] = kDimension;
    j["bias"] = model.bias;
    j["threshold"] = model.threshold;
    j["l2_lambda"] = model.l2_lambda;
    json weights = json::array();
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
        if (model.weights[i] != 0.0) {
            weights.push_back(json::array({i, model.weights[i]}));
        }
    }
    j["weights"] = std::move(weights);
    out << j.dump() << '\n';
}

void save(const QualityModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write model file " + path);
    save(model, out);
}

QualityModel load(std::istream& in, const std::string& name) {
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(name + ": not a JSON object");
    if (j.value("version", 0) != 1) throw ParseError(name + ": unsupported model version");
    if (j.value("dimension", std::size_t{0}) != kDimension) {
        throw ParseError(name + ": unexpected feature dimension");
    }
    QualityModel model;
    model.bias = j.value("bias", 0.0);
    model.threshold = j.value("threshold", 0.5);
    model.l2_lambda = j.value("l2_lambda", 0.0);
    if (!(model.threshold > 0.0 && model.threshold < 1.0)) {
        throw ParseError(name + ": threshold must be in (0, 1)");
    }
    if (!j.contains("weights") || !j["weights"].is_array()) {
        throw ParseError(name + ": missing \"weights\" array");
    }
    for (const auto& entry : j["weights"]) {
        if (!entry.is_array() || entry.size() != 2) {
            throw ParseError(name + ": weights entries must be [index, value] pairs");
        }
        const std::size_t idx = entry[0].get<std::size_t>();
        if (idx >= kDimension) throw ParseError(name + ": weight index out of range");
        const double v = entry[1].get<double>();
        if (!std::isfinite(v)) throw ParseError(name + ": non-finite weight");
        model.weights[idx] = v;
    }
    return model;
}

QualityModel load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file " + path);
    return load(in, path);
}

}  // namespace morphobpe::quality
