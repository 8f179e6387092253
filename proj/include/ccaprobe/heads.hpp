#pragma once

#include "ccaprobe/tensor.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ccaprobe {

// Final fully-connected layer. Row c of `weights` is the class component of
// class c: its scalar product with a feature vector (plus bias[c]) is that
// class's logit.
struct LinearHead {
    Matrix weights;  // n_c x n
    Vector bias;     // n_c

    Index classes() const { return weights.rows(); }
    Index features() const { return weights.cols(); }
};

// Throws DataError unless the head is finite, has >= 2 classes and a matching bias.
void validate(const LinearHead& head);

struct LabeledFeatures {
    FeatureMatrix features;
    std::vector<int> labels;

    Index size() const { return features.rows(); }
};

// Rows and labels aligned, labels in [0, n_classes).
void validate(const LabeledFeatures& data, Index n_classes);

enum class Metric { accuracy, macro_f1 };

Metric metric_from_string(std::string_view name);
std::string_view to_string(Metric metric);

FeatureMatrix logits(const LinearHead& head, const FeatureMatrix& x);

// Ties resolve to the lowest class index.
std::vector<int> argmax_rows(const Matrix& scores);

struct Prediction {
    FeatureMatrix probabilities;
    std::vector<int> classes;
};

Prediction softmax_predict(const FeatureMatrix& logits);

// Macro F1 averages per-class F1 over all n_classes; a class that is never
// predicted and never present scores 0.
double score(std::span<const int> predicted, std::span<const int> labels, Index n_classes,
             Metric metric);

double evaluate(const LinearHead& head, const LabeledFeatures& data, Metric metric);

struct TrainHyper {
    double lr = 0.05;
    int epochs = 30;
    int batch = 64;
    std::uint64_t seed = 0;
    double weight_decay = 1e-4;
};

// Mean softmax cross-entropy plus 0.5 * weight_decay * ||W||^2, with its gradient.
struct LossGradient {
    double loss = 0.0;
    Matrix weights;
    Vector bias;
};

LossGradient cross_entropy(const LinearHead& head, const FeatureMatrix& x, std::span<const int> labels,
                           double weight_decay);

// Small Gaussian initialization (std 1/sqrt(n)), zero bias.
LinearHead random_head(Index n_classes, Index n_features, std::uint64_t seed);

// Multinomial logistic regression by mini-batch SGD. Starts from `init` or
// from random_head(n_classes, ...). Returns the parameters with the lowest
// full-batch training loss seen, so the result never scores worse than the
// start. Throws NumericalError when the loss stops being finite.
LinearHead retrain_head(const LabeledFeatures& train, const std::optional<LinearHead>& init,
                        Index n_classes, const TrainHyper& hyper);

}  // namespace ccaprobe
