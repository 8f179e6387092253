#pragma once

#include "ccaprobe/config.hpp"
#include "ccaprobe/experiments.hpp"
#include "ccaprobe/fusion.hpp"
#include "ccaprobe/nets.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ccaprobe {

struct TrainedNetwork {
    MlpModel model;
    NetworkFeatures features;
    std::uint64_t seed = 0;
};

struct TrainedSensor {
    std::string name;
    std::vector<TrainedNetwork> inits;  // inits[0] is the main network
};

SyntheticDataset generate_stage(const RunConfig& config);
std::vector<TrainedSensor> train_stage(const RunConfig& config, const SyntheticDataset& data);
std::vector<SensorNetworks> sensor_networks(std::span<const TrainedSensor> trained);
CurveGrid curve_stage(const RunConfig& config, std::span<const SensorNetworks> sensors);
FusionReport fusion_stage(const RunConfig& config, const SensorNetworks& first, const SensorNetworks& second);

CurveOptions curve_options(const RunConfig& config);

void write_dataset(const std::filesystem::path& dir, const SyntheticDataset& data, std::uint64_t seed);
SyntheticDataset read_dataset(const std::filesystem::path& dir, const RunConfig& config);
void write_networks(const std::filesystem::path& dir, std::span<const TrainedSensor> trained);
std::vector<SensorNetworks> read_networks(const std::filesystem::path& dir, const RunConfig& config);
// One CSV and one SVG per ordered sensor pair; returns the CSV paths.
std::vector<std::filesystem::path> write_curves(const std::filesystem::path& dir, const CurveGrid& grid,
                                                std::span<const SensorNetworks> sensors, const RunConfig& config);
void write_fusion(const std::filesystem::path& dir, const FusionReport& report, const std::string& first,
                  const std::string& second);

std::filesystem::path network_stem(const std::filesystem::path& dir, const std::string& sensor, int init);

struct PipelineResult {
    std::vector<SensorNetworks> sensors;
    CurveGrid grid;
    FusionReport fusion;
};

// gen-data -> train -> curve -> fuse, writing everything under out_dir.
PipelineResult run_pipeline(const RunConfig& config, const std::filesystem::path& out_dir);

}  // namespace ccaprobe
