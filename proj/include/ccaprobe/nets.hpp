#pragma once

#include "ccaprobe/heads.hpp"
#include "ccaprobe/tensor.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccaprobe {

struct SensorSpec {
    std::string name;
    // Scale of the class latent reaching this sensor; 0 means the sensor sees
    // only noise.
    double informativeness = 1.0;
    int nuisance_dim = 8;
    // Sensors sharing a map seed observe the latent through the same map.
    std::optional<std::uint64_t> map_seed;
};

// Multi-sensor classification task. Every sample draws a class c and a latent
// z = mean_c + within_class_sigma * N(0, I). Sensor m observes
// informativeness_m * Q_m z + noise, concatenated with private nuisance
// coordinates, where Q_m is a fixed random orthogonal map.
struct SyntheticSpec {
    int n_classes = 8;
    int shared_dim = 8;
    double class_separation = 1.5;
    double within_class_sigma = 1.0;
    double noise_sigma = 1.0;
    double nuisance_sigma = 1.0;
    int n_samples = 10000;
    double val_fraction = 0.2;
    std::vector<SensorSpec> sensors{{"sensor0", 1.0, 8, std::nullopt}, {"sensor1", 0.7, 8, std::nullopt}};
    std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);

struct SensorSplit {
    std::string name;
    LabeledFeatures train;
    LabeledFeatures val;
};

// Row i of every sensor (in each split) comes from the same underlying sample.
struct SyntheticDataset {
    int n_classes = 0;
    std::vector<SensorSplit> sensors;
};

SyntheticDataset generate(const SyntheticSpec& spec);

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;     // out
};

// ReLU on every hidden layer, linear output layer.
struct MlpModel {
    std::vector<DenseLayer> layers;

    Index input_dim() const { return layers.front().weights.cols(); }
    Index classes() const { return layers.back().weights.rows(); }
    Index penultimate_dim() const { return layers.back().weights.cols(); }
    std::vector<Index> sizes() const;
};

void validate(const MlpModel& model);

// He-normal weights, zero biases. sizes = {input, hidden..., n_classes}.
MlpModel init_mlp(std::span<const Index> sizes, std::uint64_t seed);

FeatureMatrix forward_logits(const MlpModel& model, const FeatureMatrix& raw);

struct MlpGradient {
    double loss = 0.0;
    std::vector<DenseLayer> layers;
};

// Mean cross-entropy + 0.5 * weight_decay * sum ||W_l||^2 and its gradient.
MlpGradient mlp_loss_gradient(const MlpModel& model, const FeatureMatrix& raw, std::span<const int> labels,
                              double weight_decay);

// Plain mini-batch SGD; bitwise deterministic given hyper.seed.
MlpModel train_mlp(const LabeledFeatures& data, std::span<const Index> sizes, const TrainHyper& hyper);

struct Extraction {
    FeatureMatrix features;  // penultimate activations, s x penultimate_dim
    LinearHead head;         // last layer
};

Extraction extract_features(const MlpModel& model, const FeatureMatrix& raw);

}  // namespace ccaprobe
