#include "doctest.h"
#include "support.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/fusion.hpp"
#include "ccaprobe/pipeline.hpp"

#include <cmath>

using namespace ccaprobe;
using testing::gaussian;

namespace {

LinearHead head_from_logits_identity(Index c) { return {Matrix::Identity(c, c), Vector::Zero(c)}; }

Matrix row(std::initializer_list<double> v) {
    Matrix m(1, static_cast<Index>(v.size()));
    Index j = 0;
    for (double x : v) m(0, j++) = x;
    return m;
}

struct Task {
    RunConfig config;
    std::vector<SensorNetworks> sensors;
};

const Task& small_task() {
    static const Task t = [] {
        Task out;
        out.config.seed = 31;
        out.config.dataset.n_samples = 4000;
        out.config.hidden = {32};
        out.config.inits = 1;
        out.config.train.epochs = 15;
        out.sensors = sensor_networks(train_stage(out.config, generate_stage(out.config)));
        return out;
    }();
    return t;
}

TrainHyper fusion_hyper(const Task& t) {
    TrainHyper h = t.config.train;
    h.seed = 32;
    return h;
}

// Sampling error of the difference of two accuracies on n rows.
double noise(double p, Index n) { return std::sqrt(2 * p * (1 - p) / static_cast<double>(n)); }

}  // namespace

TEST_CASE("logit_sum: hand examples and tie rule") {
    const LinearHead id = head_from_logits_identity(2);
    CHECK(logit_sum(id, row({1, 2}), id, row({3, 1})) == std::vector<int>{0});
    CHECK(logit_sum(id, row({1.5, -2}), id, row({-1.5, 2})) == std::vector<int>{0});
    CHECK(logit_sum(id, row({10, 0}), id, row({-6, -5})) == std::vector<int>{0});
}

TEST_CASE("logit_sum agrees with a per-sample loop") {
    const LinearHead h1{gaussian(4, 5, 1), testing::gaussian_vector(4, 2)};
    const LinearHead h2{gaussian(4, 3, 3), testing::gaussian_vector(4, 4)};
    const Matrix x1 = gaussian(100, 5, 5), x2 = gaussian(100, 3, 6);
    const std::vector<int> got = logit_sum(h1, x1, h2, x2);
    for (Index s = 0; s < 100; ++s) {
        int best = 0;
        double best_value = -1e300;
        for (Index c = 0; c < 4; ++c) {
            double v = h1.bias[c] + h2.bias[c];
            for (Index j = 0; j < 5; ++j) v += h1.weights(c, j) * x1(s, j);
            for (Index j = 0; j < 3; ++j) v += h2.weights(c, j) * x2(s, j);
            if (v > best_value) {
                best_value = v;
                best = static_cast<int>(c);
            }
        }
        CHECK(got[static_cast<std::size_t>(s)] == best);
    }
}

TEST_CASE("logit_sum ignores per-sample constant shifts") {
    const LinearHead id = head_from_logits_identity(5);
    const Matrix y1 = gaussian(200, 5, 7), y2 = gaussian(200, 5, 8);
    const Vector a = testing::gaussian_vector(200, 9) * 50, b = testing::gaussian_vector(200, 10) * 50;
    Matrix s1 = y1, s2 = y2;
    for (Index i = 0; i < 200; ++i) {
        s1.row(i).array() += a[i];
        s2.row(i).array() += b[i];
    }
    CHECK(logit_sum(id, s1, id, s2) == logit_sum(id, y1, id, y2));
}

TEST_CASE("prob_average: hand examples") {
    const LinearHead id = head_from_logits_identity(2);
    // Logits whose softmax is (0.9, 0.1) and (0.2, 0.8).
    const Matrix a = row({std::log(0.9), std::log(0.1)}), b = row({std::log(0.2), std::log(0.8)});
    CHECK(prob_average(id, a, id, b) == std::vector<int>{0});
    CHECK(prob_average(id, row({10, 0}), id, row({-6, -5})) == std::vector<int>{0});

    const LinearHead h{gaussian(3, 4, 11), testing::gaussian_vector(3, 12)};
    const Matrix x = gaussian(150, 4, 13);
    CHECK(prob_average(h, x, h, x) == argmax_rows(logits(h, x)));
}

TEST_CASE("logit_sum and prob_average can disagree") {
    // With two classes both rules reduce to the sign of the summed margin, so
    // the search needs at least three.
    const LinearHead id = head_from_logits_identity(3);
    Rng rng(14);
    std::normal_distribution<double> normal(0.0, 4.0);
    bool found = false;
    for (int trial = 0; trial < 100000 && !found; ++trial) {
        const Matrix a = row({normal(rng), normal(rng), normal(rng)});
        const Matrix b = row({normal(rng), normal(rng), normal(rng)});
        const int by_sum = logit_sum(id, a, id, b)[0];
        const int by_prob = prob_average(id, a, id, b)[0];
        if (by_sum != by_prob) {
            // Independent check of both verdicts.
            auto softmax = [](const Matrix& y, Index c) {
                long double z = 0;
                for (Index j = 0; j < 3; ++j) z += std::exp(static_cast<long double>(y(0, j)));
                return std::exp(static_cast<long double>(y(0, c))) / z;
            };
            CHECK(a(0, by_sum) + b(0, by_sum) > a(0, by_prob) + b(0, by_prob));
            CHECK(softmax(a, by_prob) + softmax(b, by_prob) > softmax(a, by_sum) + softmax(b, by_sum));
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("heads consistent under an invertible map predict like either network") {
    const LinearHead h1{gaussian(4, 6, 15), testing::gaussian_vector(4, 16)};
    const Matrix m = gaussian(6, 6, 17) + 3.0 * Matrix::Identity(6, 6);
    const Matrix x1 = gaussian(300, 6, 18);
    const Matrix x2 = x1 * m;
    LinearHead h2 = h1;
    h2.weights = h1.weights * Matrix(m.inverse().transpose());
    const std::vector<int> single = argmax_rows(logits(h1, x1));
    CHECK(logit_sum(h1, x1, h2, x2) == single);
    CHECK(argmax_rows(logits(h2, x2)) == single);
}

TEST_CASE("fusing a sensor with itself matches the single network") {
    const Task& t = small_task();
    const NetworkFeatures& a = t.sensors[0].main;
    // Every correlation is 1, so only the full set of pairs is well defined.
    const FusionReport r = equivalence_test(a, a, a.train.features.cols(), fusion_hyper(t));
    CHECK(std::abs(r.acc_cca_fusion - r.acc_first) <= 0.01);
    CHECK(r.acc_logit_sum == r.acc_first);
    CHECK(r.acc_prob_average == r.acc_first);
}

TEST_CASE("two-sensor task: fusion tracks logit summation") {
    const Task& t = small_task();
    const NetworkFeatures& a = t.sensors[0].main;
    const NetworkFeatures& b = t.sensors[1].main;
    const FusionReport r = equivalence_test(a, b, std::nullopt, fusion_hyper(t));
    const Index n_val = a.val.size();
    CHECK(std::abs(r.acc_cca_fusion - r.acc_logit_sum) <= 0.01);
    CHECK(r.agreement >= 0.9);

    // Independent recomputation of the reported columns.
    CHECK(r.acc_first == evaluate(a.head, a.val, Metric::accuracy));
    CHECK(r.acc_second == evaluate(b.head, b.val, Metric::accuracy));
    CHECK(r.acc_logit_sum ==
          score(logit_sum(a.head, a.val.features, b.head, b.val.features), a.val.labels, 8, Metric::accuracy));

    const CcaBasis basis = fit_cca(a.train.features, b.train.features);
    const CcaFusion at_nc = cca_fusion(basis, a.train, b.train, a.val, b.val, 8, 8, fusion_hyper(t));
    const CcaFusion full = cca_fusion(basis, a.train, b.train, a.val, b.val, basis.pairs(), 8, fusion_hyper(t));
    CHECK(at_nc.accuracy == r.acc_cca_fusion);
    CHECK(full.accuracy >= at_nc.accuracy - noise(at_nc.accuracy, n_val));
}

TEST_CASE("perfectly correlated sensors: fusion is as good as the best sensor") {
    SyntheticSpec spec;
    spec.n_samples = 4000;
    spec.noise_sigma = 1e-6;
    spec.seed = 33;
    spec.sensors = {{"a", 1.0, 0, std::nullopt}, {"b", 1.0, 0, std::nullopt}};
    const SyntheticDataset data = generate(spec);
    TrainHyper hyper;
    hyper.epochs = 40;
    hyper.seed = 34;
    std::vector<NetworkFeatures> nets;
    for (const SensorSplit& s : data.sensors)
        nets.push_back({s.train, s.val, retrain_head(s.train, std::nullopt, 8, hyper)});
    const FusionReport r = equivalence_test(nets[0], nets[1], std::nullopt, hyper);
    CHECK(r.acc_cca_fusion >= std::max(r.acc_first, r.acc_second) - 0.01);
}

TEST_CASE("pure-noise sensors still produce a well-formed report") {
    SyntheticSpec spec;
    spec.n_samples = 2000;
    spec.seed = 35;
    spec.sensors = {{"a", 0.0, 4, std::nullopt}, {"b", 0.0, 4, std::nullopt}};
    const SyntheticDataset data = generate(spec);
    TrainHyper hyper;
    hyper.epochs = 5;
    std::vector<NetworkFeatures> nets;
    for (const SensorSplit& s : data.sensors)
        nets.push_back({s.train, s.val, retrain_head(s.train, std::nullopt, 8, hyper)});
    const FusionReport r = equivalence_test(nets[0], nets[1], std::nullopt, hyper);
    for (double v : {r.acc_cca_fusion, r.acc_logit_sum, r.acc_prob_average, r.agreement}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("fusion errors") {
    const Task& t = small_task();
    const NetworkFeatures& a = t.sensors[0].main;
    const NetworkFeatures& b = t.sensors[1].main;
    const CcaBasis basis = fit_cca(a.train.features, b.train.features);
    CHECK_THROWS_AS(cca_fusion(basis, a.train, b.train, a.val, b.val, 0, 8, TrainHyper{}), UsageError);
    CHECK_THROWS_AS(cca_fusion(basis, a.train, b.train, a.val, b.val, basis.pairs() + 1, 8, TrainHyper{}),
                    UsageError);
    CHECK_THROWS_AS(cca_fusion(basis, a.train, b.val, a.val, b.val, 4, 8, TrainHyper{}), DataError);
    const LinearHead id = head_from_logits_identity(2);
    CHECK_THROWS_AS(logit_sum(id, gaussian(3, 2, 1), id, gaussian(4, 2, 2)), DataError);
}
