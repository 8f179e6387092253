#pragma once

#include "ccaprobe/heads.hpp"
#include "ccaprobe/nets.hpp"
#include "ccaprobe/projectors.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccaprobe {

struct CurveConfig {
    std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
    int repeats = 5;
    std::optional<std::vector<Index>> schedule;
    Metric metric = Metric::accuracy;
    bool retrain = true;
    std::optional<int> retrain_epochs;  // defaults to train.epochs
};

// Whole-experiment configuration. Parsed from JSON; unknown keys are errors
// and "seed" is mandatory.
struct RunConfig {
    std::uint64_t seed = 0;
    std::filesystem::path output_dir = "ccaprobe-out";
    SyntheticSpec dataset;
    std::vector<Index> hidden{64};
    int inits = 6;  // networks per sensor: one main + same-sensor CCA partners
    TrainHyper train{0.05, 30, 64, 0, 1e-4};
    CurveConfig curve;
    std::optional<Index> fusion_k;
    double variance_keep = kDefaultVarianceKeep;

    TrainHyper retrain_hyper() const;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

// JSON text of the default configuration with the given seed.
std::string default_config_json(std::uint64_t seed);

}  // namespace ccaprobe
