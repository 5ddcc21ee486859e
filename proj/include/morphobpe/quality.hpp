#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphobpe/document.hpp"

namespace morphobpe::quality {

inline constexpr std::size_t kDimension = 1u << 18;  // hashed feature buckets
inline constexpr std::size_t kMaxChars = 8192;       // featurized prefix length

// Sparse, L2-normalized counts of hashed character n-grams (n = 1..3)
// over the first kMaxChars characters. Indices are strictly increasing.
using FeatureVector = std::vector<std::pair<std::uint32_t, double>>;

FeatureVector featurize(std::string_view text);

struct QualityModel {
    std::vector<double> weights = std::vector<double>(kDimension, 0.0);
    double bias = 0.0;
    double l2_lambda = 0.0;
    double threshold = 0.5;
};

struct LabeledExample {
    FeatureVector features;
    double target = 0.0;  // 1 = positive (high quality), 0 = negative
};

// Mean regularized logistic loss over the batch with its analytic
// gradient; the training loop and the finite-difference checks both go
// through here.
struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad_w;
    double grad_b = 0.0;
};
LossGrad logistic_loss_and_grad(const std::vector<double>& weights, double bias,
                                double l2_lambda,
                                const std::vector<const LabeledExample*>& batch);

double predict(const std::vector<double>& weights, double bias, const FeatureVector& fv);

struct TrainStats {
    double final_loss = 0.0;
    std::vector<double> epoch_losses;
};

struct QualityTrainOptions {
    int epochs = 10;
    double learning_rate = 0.1;
    double l2_lambda = 1e-6;
    int batch_size = 32;
    std::uint64_t seed = 0;
};

// Mini-batch gradient descent on the regularized logistic loss; the
// shuffle is SplitMix64(seed) so runs are reproducible. Throws
// TrainingError when the loss stops being finite.
std::pair<QualityModel, TrainStats> train_quality(const std::vector<pipeline::Document>& pos,
                                                  const std::vector<pipeline::Document>& neg,
                                                  const QualityTrainOptions& opts);

// sigmoid(w . featurize(body) + b), clamped into (0, 1).
double score(const QualityModel& model, const pipeline::Document& doc);

void save(const QualityModel& model, std::ostream& out);
void save(const QualityModel& model, const std::string& path);
QualityModel load(std::istream& in, const std::string& name = "<stream>");
QualityModel load(const std::string& path);

}  // namespace morphobpe::quality
