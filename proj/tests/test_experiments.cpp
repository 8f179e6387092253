#include "doctest.h"
#include "support.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/experiments.hpp"
#include "ccaprobe/pipeline.hpp"

#include <algorithm>
#include <cmath>

using namespace ccaprobe;

namespace {

// Small two-sensor task, trained once for the whole file.
struct Trained {
    RunConfig config;
    std::vector<SensorNetworks> sensors;
};

RunConfig small_config(std::uint64_t seed) {
    RunConfig c;
    c.seed = seed;
    c.dataset.n_samples = 3000;
    c.hidden = {32};
    c.inits = 3;
    c.train.epochs = 12;
    c.curve.repeats = 3;
    // Retraining inherits the 12 training epochs; a thinner schedule keeps it cheap.
    c.curve.schedule = std::vector<Index>{1, 2, 4, 8, 16, 32};
    return c;
}

const Trained& trained() {
    static const Trained t = [] {
        Trained out;
        out.config = small_config(5);
        const SyntheticDataset data = generate_stage(out.config);
        const std::vector<TrainedSensor> nets = train_stage(out.config, data);
        out.sensors = sensor_networks(nets);
        return out;
    }();
    return t;
}

const CurveResult& find(const std::vector<CurveResult>& curves, Method m) {
    for (const CurveResult& c : curves)
        if (c.method == m) return c;
    FAIL("method missing from the curve set");
    throw std::logic_error("unreachable");
}

// Sampling error of the difference of two accuracies measured on n_val rows;
// the floor for "within noise" comparisons where the repeat std is zero.
double noise(double p, Index n_val, double repeat_std) {
    return std::max(repeat_std, std::sqrt(2 * p * (1 - p) / static_cast<double>(n_val)));
}

std::vector<CurveResult> same_sensor_curves() {
    const Trained& t = trained();
    CurveOptions options = curve_options(t.config);
    return run_curve(t.sensors[0].main, t.sensors[0].same_sensor_partners, options);
}

}  // namespace

TEST_CASE("component schedule examples") {
    std::vector<Index> shl;
    for (Index i = 1; i <= 16; ++i) shl.push_back(i);
    shl.insert(shl.end(), {32, 64, 128});
    CHECK(component_schedule(8, 128) == shl);

    std::vector<Index> cifar;
    for (Index i = 1; i <= 20; ++i) cifar.push_back(i);
    cifar.insert(cifar.end(), {32, 64});
    CHECK(component_schedule(10, 64) == cifar);

    CHECK(component_schedule(2, 4) == std::vector<Index>{1, 2, 3, 4});
    CHECK_THROWS_AS(component_schedule(8, 7), UsageError);
}

TEST_CASE("schedule: strictly increasing and always ends at n") {
    for (Index nc = 1; nc <= 12; ++nc)
        for (Index n = nc; n <= 300; n += 7) {
            const std::vector<Index> s = component_schedule(nc, n);
            CHECK(s.back() == n);
            CHECK(s.front() == 1);
            CHECK(std::adjacent_find(s.begin(), s.end(), std::greater_equal<>()) == s.end());
        }
}

TEST_CASE("run_curve: baseline, orderings, retraining and determinism") {
    const Trained& t = trained();
    const NetworkFeatures& main = t.sensors[0].main;
    const Index n = main.train.features.cols();
    const Index n_val = main.val.size();
    const std::vector<CurveResult> curves = same_sensor_curves();
    REQUIRE(curves.size() == kAllMethods.size());

    const double baseline = evaluate(main.head, main.val, Metric::accuracy);
    for (const CurveResult& c : curves) {
        CAPTURE(to_string(c.method));
        CHECK(c.baseline == baseline);
        const CurveAggregate* full = c.at(n);
        REQUIRE(full != nullptr);
        for (const CurvePoint& p : c.points)
            if (p.n_s == n) CHECK(p.metric_before == baseline);

        for (std::size_t i = 1; i < c.aggregate.size(); ++i) CHECK(c.aggregate[i].n_s > c.aggregate[i - 1].n_s);
        for (const CurvePoint& p : c.points) {
            CHECK(p.metric_before >= 0.0);
            CHECK(p.metric_before <= 1.0);
            REQUIRE(p.metric_after.has_value());
        }
        for (const CurveAggregate& a : c.aggregate) {
            const double floor = noise(a.mean_before, n_val, a.std_before);
            CAPTURE(a.n_s);
            CHECK(*a.mean_after >= a.mean_before - floor);
        }
    }

    for (Method m : {Method::cca_highest, Method::pca_top}) {
        const CurveResult& c = find(curves, m);
        for (std::size_t i = 0; i < c.aggregate.size(); ++i)
            for (std::size_t j = 0; j < i; ++j) {
                const CurveAggregate& hi = c.aggregate[i];
                const CurveAggregate& lo = c.aggregate[j];
                CAPTURE(hi.n_s);
                CAPTURE(lo.n_s);
                CHECK(hi.mean_before >= lo.mean_before - 2 * noise(hi.mean_before, n_val, hi.std_before));
            }
    }

    const Index half = n / 2;
    REQUIRE(half == 16);
    CHECK(find(curves, Method::cca_lowest).at(half)->mean_before <
          find(curves, Method::random_selection).at(half)->mean_before);

    const std::vector<CurveResult> again = same_sensor_curves();
    for (std::size_t m = 0; m < curves.size(); ++m) {
        REQUIRE(again[m].points.size() == curves[m].points.size());
        for (std::size_t i = 0; i < curves[m].points.size(); ++i) {
            CHECK(again[m].points[i].metric_before == curves[m].points[i].metric_before);
            CHECK(again[m].points[i].metric_after == curves[m].points[i].metric_after);
        }
    }
}

TEST_CASE("run_curve: std is the population std over repeats") {
    const std::vector<CurveResult> curves = same_sensor_curves();
    const CurveResult& c = find(curves, Method::random_projection);
    const CurveAggregate& a = c.aggregate.front();
    std::vector<double> v;
    for (const CurvePoint& p : c.points)
        if (p.n_s == a.n_s) v.push_back(p.metric_before);
    REQUIRE(v.size() == 3);
    const double mean = (v[0] + v[1] + v[2]) / 3;
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    CHECK(a.mean_before == doctest::Approx(mean).epsilon(1e-12));
    CHECK(a.std_before == doctest::Approx(std::sqrt(var / 3)).epsilon(1e-12));
}

TEST_CASE("run_grid: diagonal equals run_curve, off-diagonal runs CCA methods") {
    const Trained& t = trained();
    CurveOptions options = curve_options(t.config);
    options.retrain = false;
    options.methods = {Method::cca_highest, Method::pca_top};
    const CurveGrid grid = run_grid(t.sensors, options);
    REQUIRE(grid.size() == 2);
    REQUIRE(grid[0].size() == 2);

    CurveOptions cell = options;
    cell.seed = derive_seed(options.seed, {0, 0});
    const std::vector<CurveResult> direct = run_curve(t.sensors[0].main, t.sensors[0].same_sensor_partners, cell);
    REQUIRE(grid[0][0].size() == direct.size());
    for (std::size_t m = 0; m < direct.size(); ++m)
        for (std::size_t i = 0; i < direct[m].points.size(); ++i)
            CHECK(grid[0][0][m].points[i].metric_before == direct[m].points[i].metric_before);

    REQUIRE(grid[0][1].size() == 1);
    CHECK(grid[0][1][0].method == Method::cca_highest);
    CHECK(grid[0][1][0].basis_sensor == t.sensors[0].name);
    CHECK(grid[0][1][0].evaluated_sensor == t.sensors[1].name);

    // Shared latent: cca_highest at n_c stays close to the baseline.
    const CurveResult& off = grid[0][1][0];
    CHECK(off.at(8)->mean_before >= off.baseline - 0.05);

    CHECK_THROWS_AS(run_grid(std::span(t.sensors).first(1), options), UsageError);
}

TEST_CASE("run_grid: a sensor without signal gives a poor cross-sensor basis") {
    RunConfig c = small_config(9);
    c.dataset.sensors[1].informativeness = 0.0;
    c.inits = 2;
    const std::vector<SensorNetworks> sensors = sensor_networks(train_stage(c, generate_stage(c)));
    CurveOptions options = curve_options(c);
    options.retrain = false;
    options.repeats = 1;
    options.methods = {Method::cca_highest};
    const CurveGrid grid = run_grid(sensors, options);
    const double diagonal = grid[0][0][0].at(8)->mean_before;
    const double cross = grid[1][0][0].at(8)->mean_before;  // basis from the blind sensor
    CHECK(cross < diagonal - 0.2);
}

TEST_CASE("run_curve input errors") {
    const Trained& t = trained();
    CurveOptions options;
    options.repeats = 0;
    CHECK_THROWS_AS(run_curve(t.sensors[0].main, t.sensors[0].same_sensor_partners, options), UsageError);
    options = CurveOptions{};
    CHECK_THROWS_AS(run_curve(t.sensors[0].main, {}, options), UsageError);
    options.schedule = std::vector<Index>{3, 2};
    CHECK_THROWS_AS(run_curve(t.sensors[0].main, t.sensors[0].same_sensor_partners, options), UsageError);
}
