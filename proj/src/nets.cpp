#include "ccaprobe/nets.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/kernels.hpp"
#include "ccaprobe/random.hpp"

#include <Eigen/QR>

#include <cmath>
#include <numeric>
#include <string>

namespace ccaprobe {
namespace {

Matrix gaussian(Index rows, Index cols, double sigma, Rng& rng) {
    std::normal_distribution<double> normal(0.0, sigma);
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
    return m;
}

Matrix random_orthogonal(Index n, std::uint64_t seed) {
    Rng rng(seed);
    const Eigen::MatrixXd g = gaussian(n, n, 1.0, rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Fix the QR sign ambiguity so Q is Haar distributed.
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q;
}

// Forward pass keeping every layer's post-activation (index 0 is the input).
std::vector<Matrix> forward_all(const MlpModel& model, const Matrix& x) {
    std::vector<Matrix> acts;
    acts.reserve(model.layers.size() + 1);
    acts.push_back(x);
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Matrix pre = kernels::affine(acts.back(), model.layers[l].weights, model.layers[l].bias);
        if (l + 1 < model.layers.size()) kernels::relu_inplace(pre);
        acts.push_back(std::move(pre));
    }
    return acts;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
    if (spec.n_classes < 2) throw UsageError("synthetic spec: n_classes must be >= 2");
    if (spec.shared_dim < 1) throw UsageError("synthetic spec: shared_dim must be >= 1");
    if (!(spec.noise_sigma > 0.0)) throw UsageError("synthetic spec: noise_sigma must be > 0");
    if (spec.within_class_sigma < 0.0 || spec.class_separation < 0.0 || spec.nuisance_sigma < 0.0)
        throw UsageError("synthetic spec: scales must be nonnegative");
    if (spec.sensors.empty()) throw UsageError("synthetic spec: at least one sensor required");
    if (!(spec.val_fraction > 0.0 && spec.val_fraction < 1.0))
        throw UsageError("synthetic spec: val_fraction must lie in (0, 1)");
    const int n_val = static_cast<int>(std::lround(spec.val_fraction * spec.n_samples));
    if (n_val < 1 || spec.n_samples - n_val < 3) throw UsageError("synthetic spec: too few samples");
    for (const SensorSpec& s : spec.sensors) {
        if (s.nuisance_dim < 0) throw UsageError("synthetic spec: nuisance_dim must be >= 0");
        if (!(s.informativeness >= 0.0 && s.informativeness <= 1.0))
            throw UsageError("synthetic spec: informativeness must lie in [0, 1]");
    }
}

SyntheticDataset generate(const SyntheticSpec& spec) {
    validate(spec);
    const Index s = spec.n_samples, d = spec.shared_dim;

    Rng latent_rng(derive_seed(spec.seed, {1}));
    const Matrix means = gaussian(spec.n_classes, d, spec.class_separation, latent_rng);
    std::vector<int> labels(static_cast<std::size_t>(s));
    for (int& y : labels) y = static_cast<int>(latent_rng() % static_cast<std::uint64_t>(spec.n_classes));
    Matrix z = gaussian(s, d, spec.within_class_sigma, latent_rng);
    for (Index i = 0; i < s; ++i) z.row(i) += means.row(labels[static_cast<std::size_t>(i)]);

    const Index n_val = std::lround(spec.val_fraction * static_cast<double>(s));
    const Index n_train = s - n_val;
    const std::vector<int> train_labels(labels.begin(), labels.begin() + n_train);
    const std::vector<int> val_labels(labels.begin() + n_train, labels.end());

    SyntheticDataset out;
    out.n_classes = spec.n_classes;
    for (std::size_t m = 0; m < spec.sensors.size(); ++m) {
        const SensorSpec& sensor = spec.sensors[m];
        const std::uint64_t map_seed = sensor.map_seed.value_or(derive_seed(spec.seed, {2, m}));
        const Matrix map = random_orthogonal(d, map_seed);

        Rng rng(derive_seed(spec.seed, {3, m}));
        Matrix raw(s, d + sensor.nuisance_dim);
        raw.leftCols(d) = sensor.informativeness * (z * map.transpose()) + gaussian(s, d, spec.noise_sigma, rng);
        if (sensor.nuisance_dim > 0)
            raw.rightCols(sensor.nuisance_dim) = gaussian(s, sensor.nuisance_dim, spec.nuisance_sigma, rng);

        SensorSplit split;
        split.name = sensor.name.empty() ? "sensor" + std::to_string(m) : sensor.name;
        split.train = {raw.topRows(n_train), train_labels};
        split.val = {raw.bottomRows(n_val), val_labels};
        out.sensors.push_back(std::move(split));
    }
    return out;
}

std::vector<Index> MlpModel::sizes() const {
    std::vector<Index> out{input_dim()};
    for (const DenseLayer& l : layers) out.push_back(l.weights.rows());
    return out;
}

void validate(const MlpModel& model) {
    if (model.layers.size() < 2) throw DataError("mlp: need at least one hidden layer");
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const DenseLayer& layer = model.layers[l];
        if (layer.bias.size() != layer.weights.rows()) throw DataError("mlp: bias length mismatch");
        if (l > 0 && layer.weights.cols() != model.layers[l - 1].weights.rows())
            throw DataError("mlp: consecutive layer shapes do not chain");
        if (!layer.weights.allFinite() || !layer.bias.allFinite()) throw DataError("mlp: non-finite parameter");
    }
    if (model.classes() < 2) throw DataError("mlp: need at least two output classes");
}

MlpModel init_mlp(std::span<const Index> sizes, std::uint64_t seed) {
    if (sizes.size() < 3) throw UsageError("mlp: architecture needs input, >= 1 hidden and output sizes");
    for (Index n : sizes)
        if (n < 1) throw UsageError("mlp: layer sizes must be positive");
    Rng rng(seed);
    MlpModel model;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const double sigma = std::sqrt(2.0 / static_cast<double>(sizes[l]));
        model.layers.push_back({gaussian(sizes[l + 1], sizes[l], sigma, rng), Vector::Zero(sizes[l + 1])});
    }
    return model;
}

FeatureMatrix forward_logits(const MlpModel& model, const FeatureMatrix& raw) {
    if (raw.cols() != model.input_dim()) throw DataError("mlp: input width does not match the model");
    return std::move(forward_all(model, raw).back());
}

MlpGradient mlp_loss_gradient(const MlpModel& model, const FeatureMatrix& raw, std::span<const int> labels,
                              double weight_decay) {
    const Index s = raw.rows();
    if (raw.cols() != model.input_dim()) throw DataError("mlp: input width does not match the model");
    if (static_cast<Index>(labels.size()) != s || s == 0) throw DataError("mlp: label count mismatch");

    const std::vector<Matrix> acts = forward_all(model, raw);
    Matrix delta = kernels::softmax_rows(acts.back());
    double loss = 0.0;
    for (Index i = 0; i < s; ++i) {
        const auto y = static_cast<Index>(labels[static_cast<std::size_t>(i)]);
        loss -= std::log(std::max(delta(i, y), 1e-300));
        delta(i, y) -= 1.0;
    }
    const double inv = 1.0 / static_cast<double>(s);
    delta *= inv;

    MlpGradient g;
    g.loss = loss * inv;
    g.layers.resize(model.layers.size());
    for (std::size_t l = model.layers.size(); l-- > 0;) {
        const DenseLayer& layer = model.layers[l];
        g.loss += 0.5 * weight_decay * layer.weights.squaredNorm();
        g.layers[l].weights = kernels::cross(delta, acts[l]) + weight_decay * layer.weights;
        g.layers[l].bias = kernels::column_sums(delta);
        if (l == 0) break;
        Matrix back = kernels::affine(delta, layer.weights.transpose());
        const Matrix& a = acts[l];
        for (Index i = 0; i < back.size(); ++i)
            if (!(a.data()[i] > 0.0)) back.data()[i] = 0.0;
        delta = std::move(back);
    }
    return g;
}

MlpModel train_mlp(const LabeledFeatures& data, std::span<const Index> sizes, const TrainHyper& hyper) {
    if (sizes.size() < 3) throw UsageError("mlp: architecture needs input, >= 1 hidden and output sizes");
    if (sizes.front() != data.features.cols()) throw DataError("mlp: input size does not match the data");
    if (!(hyper.lr > 0.0)) throw UsageError("train_mlp: learning rate must be positive");
    if (hyper.batch < 1 || hyper.epochs < 0) throw UsageError("train_mlp: invalid batch or epoch count");
    validate(data, sizes.back());

    MlpModel model = init_mlp(sizes, hyper.seed);
    Rng rng(derive_seed(hyper.seed, {0xBA7C4u}));
    std::vector<std::size_t> order(static_cast<std::size_t>(data.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<int> batch_labels;
    Matrix xb;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch));
            xb.resize(static_cast<Index>(stop - start), data.features.cols());
            batch_labels.clear();
            for (std::size_t r = start; r < stop; ++r) {
                xb.row(static_cast<Index>(r - start)) = data.features.row(static_cast<Index>(order[r]));
                batch_labels.push_back(data.labels[order[r]]);
            }
            const MlpGradient g = mlp_loss_gradient(model, xb, batch_labels, hyper.weight_decay);
            epoch_loss += g.loss;
            for (std::size_t l = 0; l < model.layers.size(); ++l) {
                model.layers[l].weights -= hyper.lr * g.layers[l].weights;
                model.layers[l].bias -= hyper.lr * g.layers[l].bias;
            }
        }
        if (!std::isfinite(epoch_loss))
            throw NumericalError("train_mlp: loss diverged at epoch " + std::to_string(epoch));
    }
    return model;
}

Extraction extract_features(const MlpModel& model, const FeatureMatrix& raw) {
    validate(model);
    if (raw.cols() != model.input_dim()) throw DataError("extract_features: input width does not match the model");
    std::vector<Matrix> acts = forward_all(model, raw);
    Extraction out;
    out.features = std::move(acts[acts.size() - 2]);
    out.head = {model.layers.back().weights, model.layers.back().bias};
    return out;
}

}  // namespace ccaprobe
