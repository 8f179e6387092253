#include "ccaprobe/experiments.hpp"

#include "ccaprobe/cca.hpp"
#include "ccaprobe/error.hpp"
#include "ccaprobe/random.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>

namespace ccaprobe {

std::vector<Index> component_schedule(Index n_classes, Index n) {
    if (n_classes < 1) throw UsageError("component_schedule: n_classes must be positive");
    if (n < n_classes) throw UsageError("component_schedule: n must be at least n_classes");
    std::vector<Index> out;
    const Index dense = std::min(2 * n_classes, n);
    for (Index i = 1; i <= dense; ++i) out.push_back(i);
    for (Index p = 1; p < n; p *= 2)
        if (p > dense) out.push_back(p);
    if (out.back() != n) out.push_back(n);
    return out;
}

const CurveAggregate* CurveResult::at(Index n_s) const {
    for (const CurveAggregate& a : aggregate)
        if (a.n_s == n_s) return &a;
    return nullptr;
}

namespace {

struct Job {
    std::size_t method;
    int repeat;
    Index n_s;
};

std::pair<double, double> mean_std(std::span<const double> v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    return {mean, std::sqrt(var / static_cast<double>(v.size()))};
}

void aggregate(CurveResult& curve) {
    std::sort(curve.points.begin(), curve.points.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return a.n_s != b.n_s ? a.n_s < b.n_s : a.repeat < b.repeat;
    });
    for (std::size_t i = 0; i < curve.points.size();) {
        std::size_t j = i;
        std::vector<double> before, after;
        while (j < curve.points.size() && curve.points[j].n_s == curve.points[i].n_s) {
            before.push_back(curve.points[j].metric_before);
            if (curve.points[j].metric_after) after.push_back(*curve.points[j].metric_after);
            ++j;
        }
        CurveAggregate a;
        a.n_s = curve.points[i].n_s;
        std::tie(a.mean_before, a.std_before) = mean_std(before);
        if (!after.empty()) {
            const auto [m, s] = mean_std(after);
            a.mean_after = m;
            a.std_after = s;
        }
        curve.aggregate.push_back(a);
        i = j;
    }
}

}  // namespace

std::vector<CurveResult> run_curve(const NetworkFeatures& evaluated, std::span<const FeatureMatrix> partner_train,
                                   const CurveOptions& options) {
    const Index n = evaluated.train.features.cols();
    const Index n_classes = evaluated.head.classes();
    validate(evaluated.head);
    validate(evaluated.train, n_classes);
    validate(evaluated.val, n_classes);
    if (evaluated.val.features.cols() != n || evaluated.head.features() != n)
        throw DataError("run_curve: train/val/head feature counts differ");
    if (options.repeats < 1) throw UsageError("run_curve: repeats must be >= 1");
    if (options.methods.empty()) throw UsageError("run_curve: no methods requested");

    const bool needs_cca = std::any_of(options.methods.begin(), options.methods.end(), is_cca);
    if (needs_cca && partner_train.empty()) throw UsageError("run_curve: CCA methods need partner features");

    const std::vector<Index> schedule = options.schedule ? *options.schedule : component_schedule(n_classes, n);
    for (std::size_t i = 0; i < schedule.size(); ++i)
        if (schedule[i] < 1 || schedule[i] > n || (i > 0 && schedule[i] <= schedule[i - 1]))
            throw UsageError("run_curve: schedule must be strictly increasing within [1, n]");

    // One basis per distinct partner; repeat r uses partner r % count.
    std::vector<CcaBasis> bases(
        needs_cca ? std::min(static_cast<std::size_t>(options.repeats), partner_train.size()) : 0);
    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < static_cast<int>(bases.size()); ++r) {
        try {
            const FeatureMatrix& partner = partner_train[static_cast<std::size_t>(r)];
            bases[static_cast<std::size_t>(r)] = fit_cca(evaluated.train.features, partner, options.variance_keep);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<CanonicalMaps> maps(bases.size());
    for (std::size_t r = 0; r < bases.size(); ++r) maps[r] = canonical_maps(bases[r], Side::first);

    const PcaModel pca = fit_pca(evaluated.train.features, 1.0);
    const Vector train_mean = pca.mean;
    const Vector activation = mean_abs_activation(evaluated.train.features);

    auto context_for = [&](std::size_t method, int repeat, Index n_s) {
        ProjectionContext ctx;
        ctx.dim = n;
        const std::size_t b = bases.empty() ? 0 : static_cast<std::size_t>(repeat) % bases.size();
        ctx.basis = bases.empty() ? nullptr : &bases[b];
        ctx.side = Side::first;
        ctx.pca = &pca;
        ctx.reference = &evaluated.train.features;
        ctx.activation = &activation;
        ctx.maps = maps.empty() ? nullptr : &maps[b];
        ctx.mean = train_mean;
        ctx.seed = derive_seed(options.seed, {static_cast<std::uint64_t>(options.methods[method]),
                                              static_cast<std::uint64_t>(repeat), static_cast<std::uint64_t>(n_s)});
        return ctx;
    };

    std::vector<Job> jobs;
    for (std::size_t m = 0; m < options.methods.size(); ++m)
        for (int r = 0; r < options.repeats; ++r) {
            const Index limit = max_components(options.methods[m], context_for(m, r, 1));
            for (Index n_s : schedule)
                if (n_s == n || n_s <= limit) jobs.push_back({m, r, n_s});
        }

    const double baseline = evaluate(evaluated.head, evaluated.val, options.metric);
    std::vector<CurvePoint> results(jobs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        try {
            const Job& job = jobs[j];
            const Projector p = make_projector(options.methods[job.method], job.n_s,
                                               context_for(job.method, job.repeat, job.n_s));
            CurvePoint& point = results[j];
            point.n_s = job.n_s;
            point.repeat = job.repeat;
            point.metric_before = evaluate(fold_into_head(evaluated.head, p), evaluated.val, options.metric);
            if (options.retrain) {
                const LabeledFeatures train{apply(p, evaluated.train.features), evaluated.train.labels};
                TrainHyper hyper = options.retrain_hyper;
                hyper.seed = derive_seed(p.seed, {0x4E7});
                const LinearHead retrained = retrain_head(train, evaluated.head, n_classes, hyper);
                point.metric_after = evaluate(fold_into_head(retrained, p), evaluated.val, options.metric);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<CurveResult> curves(options.methods.size());
    for (std::size_t m = 0; m < curves.size(); ++m) {
        curves[m].method = options.methods[m];
        curves[m].basis_sensor = options.basis_sensor;
        curves[m].evaluated_sensor = options.evaluated_sensor;
        curves[m].baseline = baseline;
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) curves[jobs[j].method].points.push_back(results[j]);
    for (CurveResult& c : curves) aggregate(c);
    return curves;
}

CurveGrid run_grid(std::span<const SensorNetworks> sensors, const CurveOptions& options) {
    if (sensors.size() < 2) throw UsageError("run_grid: need at least two sensors");
    CurveGrid grid(sensors.size());
    for (std::size_t p = 0; p < sensors.size(); ++p) {
        for (std::size_t e = 0; e < sensors.size(); ++e) {
            const SensorNetworks& evaluated = sensors[e];
            CurveOptions cell = options;
            cell.seed = derive_seed(options.seed, {p, e});
            cell.evaluated_sensor = evaluated.name;
            std::vector<FeatureMatrix> partners;
            if (p == e) {
                if (evaluated.same_sensor_partners.empty())
                    throw UsageError("run_grid: sensor '" + evaluated.name + "' has no second initialization");
                partners = evaluated.same_sensor_partners;
                cell.basis_sensor = evaluated.name + "(init)";
            } else {
                partners.push_back(sensors[p].main.train.features);
                cell.basis_sensor = sensors[p].name;
                std::erase_if(cell.methods, [](Method m) { return !is_cca(m); });
                if (cell.methods.empty()) cell.methods.push_back(Method::cca_highest);
            }
            grid[p].push_back(run_curve(evaluated.main, partners, cell));
        }
    }
    return grid;
}

}  // namespace ccaprobe
