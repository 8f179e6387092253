#pragma once

#include "ccaprobe/heads.hpp"
#include "ccaprobe/projectors.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ccaprobe {

// {1 .. 2 n_c} + {powers of two above 2 n_c} + {n}, capped at n.
std::vector<Index> component_schedule(Index n_classes, Index n);

// Features of one trained network on both splits, plus its classification layer.
struct NetworkFeatures {
    LabeledFeatures train;
    LabeledFeatures val;
    LinearHead head;
};

struct CurvePoint {
    Index n_s = 0;
    int repeat = 0;
    double metric_before = 0.0;
    std::optional<double> metric_after;  // empty when retraining is disabled
};

struct CurveAggregate {
    Index n_s = 0;
    double mean_before = 0.0;
    double std_before = 0.0;  // population std over repeats
    std::optional<double> mean_after;
    std::optional<double> std_after;
};

struct CurveResult {
    Method method = Method::cca_highest;
    std::string basis_sensor;      // where the CCA partner features came from
    std::string evaluated_sensor;
    std::vector<CurvePoint> points;        // sorted by (n_s, repeat)
    std::vector<CurveAggregate> aggregate; // n_s strictly increasing
    double baseline = 0.0;                 // metric on unprojected validation features

    const CurveAggregate* at(Index n_s) const;
};

struct CurveOptions {
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    int repeats = 5;
    std::optional<std::vector<Index>> schedule;  // default: component_schedule
    Metric metric = Metric::accuracy;
    bool retrain = true;
    TrainHyper retrain_hyper;
    double variance_keep = kDefaultVarianceKeep;
    std::uint64_t seed = 0;
    std::string basis_sensor = "partner";
    std::string evaluated_sensor = "sensor";
};

// One curve per method. Repeat r fits CCA against partner_train[r % size]
// (train-split features of another network on the same samples) and reseeds
// the random methods. Schedule points a method cannot reach (n_s above its
// component count but below n) are left out of that method's curve.
std::vector<CurveResult> run_curve(const NetworkFeatures& evaluated, std::span<const FeatureMatrix> partner_train,
                                   const CurveOptions& options);

struct SensorNetworks {
    std::string name;
    NetworkFeatures main;
    // Train features of further initializations on the same sensor.
    std::vector<FeatureMatrix> same_sensor_partners;
};

// grid[p][e]: CCA fitted between sensor p (partner) and sensor e (evaluated),
// curves evaluated on e. Diagonal cells use the same-sensor partner networks
// and run every method of options.methods; off-diagonal cells run only its
// CCA methods (cca_highest if it has none).
using CurveGrid = std::vector<std::vector<std::vector<CurveResult>>>;

CurveGrid run_grid(std::span<const SensorNetworks> sensors, const CurveOptions& options);

}  // namespace ccaprobe
