#include "ccaprobe/heads.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/kernels.hpp"
#include "ccaprobe/random.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace ccaprobe {

void validate(const LinearHead& head) {
    if (head.classes() < 2) throw DataError("linear head: need at least two classes");
    if (head.features() < 1) throw DataError("linear head: no features");
    if (head.bias.size() != head.classes()) throw DataError("linear head: bias length mismatch");
    if (!head.weights.allFinite() || !head.bias.allFinite())
        throw DataError("linear head: non-finite parameter");
}

void validate(const LabeledFeatures& data, Index n_classes) {
    require_valid(data.features, "labeled features");
    if (static_cast<Index>(data.labels.size()) != data.size())
        throw DataError("labeled features: label count does not match row count");
    for (int y : data.labels)
        if (y < 0 || y >= n_classes) throw DataError("labeled features: label out of range");
}

Metric metric_from_string(std::string_view name) {
    if (name == "accuracy") return Metric::accuracy;
    if (name == "macro_f1") return Metric::macro_f1;
    throw UsageError("unknown metric '" + std::string(name) + "'");
}

std::string_view to_string(Metric metric) {
    return metric == Metric::accuracy ? "accuracy" : "macro_f1";
}

FeatureMatrix logits(const LinearHead& head, const FeatureMatrix& x) {
    if (x.cols() != head.features()) throw DataError("logits: feature count does not match the head");
    return kernels::affine(x, head.weights, head.bias);
}

std::vector<int> argmax_rows(const Matrix& scores) {
    std::vector<int> out(static_cast<std::size_t>(scores.rows()));
    for (Index i = 0; i < scores.rows(); ++i) {
        Index best = 0;
        for (Index c = 1; c < scores.cols(); ++c)
            if (scores(i, c) > scores(i, best)) best = c;
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

Prediction softmax_predict(const FeatureMatrix& logits) {
    require_valid(logits, "softmax_predict");
    Prediction p;
    p.probabilities = kernels::softmax_rows(logits);
    p.classes = argmax_rows(logits);
    return p;
}

double score(std::span<const int> predicted, std::span<const int> labels, Index n_classes,
             Metric metric) {
    if (labels.empty()) throw DataError("score: no samples");
    if (predicted.size() != labels.size()) throw DataError("score: prediction/label count mismatch");
    if (metric == Metric::accuracy) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
        return static_cast<double>(hits) / static_cast<double>(labels.size());
    }
    std::vector<double> tp(static_cast<std::size_t>(n_classes), 0.0), fp(tp), fn(tp);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto y = static_cast<std::size_t>(labels[i]);
        const auto p = static_cast<std::size_t>(predicted[i]);
        if (p == y) {
            tp[y] += 1.0;
        } else {
            fp[p] += 1.0;
            fn[y] += 1.0;
        }
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < tp.size(); ++c) {
        const double denom = 2.0 * tp[c] + fp[c] + fn[c];
        sum += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
    }
    return sum / static_cast<double>(n_classes);
}

double evaluate(const LinearHead& head, const LabeledFeatures& data, Metric metric) {
    if (data.size() == 0) throw DataError("evaluate: empty data");
    validate(data, head.classes());
    return score(argmax_rows(logits(head, data.features)), data.labels, head.classes(), metric);
}

LossGradient cross_entropy(const LinearHead& head, const FeatureMatrix& x, std::span<const int> labels,
                           double weight_decay) {
    const Index s = x.rows();
    if (static_cast<Index>(labels.size()) != s || s == 0)
        throw DataError("cross_entropy: label count does not match row count");
    Matrix delta = kernels::softmax_rows(logits(head, x));
    double loss = 0.0;
    for (Index i = 0; i < s; ++i) {
        const auto y = static_cast<Index>(labels[static_cast<std::size_t>(i)]);
        loss -= std::log(std::max(delta(i, y), 1e-300));
        delta(i, y) -= 1.0;
    }
    const double inv = 1.0 / static_cast<double>(s);
    LossGradient g;
    g.loss = loss * inv + 0.5 * weight_decay * head.weights.squaredNorm();
    g.weights = kernels::cross(delta, x) * inv + weight_decay * head.weights;
    g.bias = kernels::column_sums(delta) * inv;
    return g;
}

LinearHead random_head(Index n_classes, Index n_features, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(n_features)));
    LinearHead head{Matrix(n_classes, n_features), Vector::Zero(n_classes)};
    for (Index i = 0; i < head.weights.size(); ++i) head.weights.data()[i] = normal(rng);
    return head;
}

namespace {

Matrix gather_rows(const Matrix& x, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = x.row(static_cast<Index>(rows[i]));
    return out;
}

}  // namespace

LinearHead retrain_head(const LabeledFeatures& train, const std::optional<LinearHead>& init,
                        Index n_classes, const TrainHyper& hyper) {
    if (train.size() == 0) throw DataError("retrain_head: empty training set");
    if (!(hyper.lr > 0.0)) throw UsageError("retrain_head: learning rate must be positive");
    if (hyper.batch < 1 || hyper.epochs < 0) throw UsageError("retrain_head: invalid batch or epoch count");
    validate(train, n_classes);

    LinearHead head = init ? *init : random_head(n_classes, train.features.cols(), hyper.seed);
    validate(head);
    if (head.classes() != n_classes || head.features() != train.features.cols())
        throw DataError("retrain_head: initial head shape does not match the data");
    if (hyper.epochs == 0) return head;

    LinearHead best = head;
    double best_loss = cross_entropy(head, train.features, train.labels, hyper.weight_decay).loss;

    Rng rng(derive_seed(hyper.seed, {0x5EEDu}));
    std::vector<std::size_t> order(static_cast<std::size_t>(train.size()));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<int> batch_labels;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(hyper.batch)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(hyper.batch));
            const std::span<const std::size_t> rows(order.data() + start, stop - start);
            const Matrix xb = gather_rows(train.features, rows);
            batch_labels.clear();
            for (std::size_t r : rows) batch_labels.push_back(train.labels[r]);
            const LossGradient g = cross_entropy(head, xb, batch_labels, hyper.weight_decay);
            head.weights -= hyper.lr * g.weights;
            head.bias -= hyper.lr * g.bias;
        }
        const double loss = cross_entropy(head, train.features, train.labels, hyper.weight_decay).loss;
        if (!std::isfinite(loss))
            throw NumericalError("retrain_head: loss diverged at epoch " + std::to_string(epoch));
        if (loss <= best_loss) {
            best_loss = loss;
            best = head;
        }
    }
    return best;
}

}  // namespace ccaprobe
