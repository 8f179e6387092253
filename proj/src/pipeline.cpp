#include "ccaprobe/pipeline.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/feature_file.hpp"
#include "ccaprobe/random.hpp"
#include "ccaprobe/report.hpp"
#include "ccaprobe/svg.hpp"

#include <exception>
#include <fstream>
#include <mutex>

namespace ccaprobe {
namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

std::vector<Index> architecture(const RunConfig& config, Index input_dim) {
    std::vector<Index> sizes{input_dim};
    sizes.insert(sizes.end(), config.hidden.begin(), config.hidden.end());
    sizes.push_back(config.dataset.n_classes);
    return sizes;
}

}  // namespace

SyntheticDataset generate_stage(const RunConfig& config) {
    SyntheticSpec spec = config.dataset;
    spec.seed = derive_seed(config.seed, {0xDA7A});
    return generate(spec);
}

std::vector<TrainedSensor> train_stage(const RunConfig& config, const SyntheticDataset& data) {
    const std::size_t n_sensors = data.sensors.size();
    const auto inits = static_cast<std::size_t>(config.inits);
    std::vector<TrainedSensor> out(n_sensors);
    for (std::size_t m = 0; m < n_sensors; ++m) {
        out[m].name = data.sensors[m].name;
        out[m].inits.resize(inits);
    }

    std::exception_ptr failure;
    std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic)
    for (std::size_t job = 0; job < n_sensors * inits; ++job) {
        try {
            const std::size_t m = job / inits, i = job % inits;
            const SensorSplit& split = data.sensors[m];
            TrainHyper hyper = config.train;
            hyper.seed = derive_seed(config.seed, {0x7EA1, m, i});
            TrainedNetwork& net = out[m].inits[i];
            net.seed = hyper.seed;
            net.model = train_mlp(split.train, architecture(config, split.train.features.cols()), hyper);
            Extraction tr = extract_features(net.model, split.train.features);
            Extraction va = extract_features(net.model, split.val.features);
            net.features = {{std::move(tr.features), split.train.labels},
                            {std::move(va.features), split.val.labels},
                            std::move(tr.head)};
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<SensorNetworks> sensor_networks(std::span<const TrainedSensor> trained) {
    std::vector<SensorNetworks> out;
    for (const TrainedSensor& t : trained) {
        SensorNetworks s;
        s.name = t.name;
        s.main = t.inits.front().features;
        for (std::size_t i = 1; i < t.inits.size(); ++i) s.same_sensor_partners.push_back(t.inits[i].features.train.features);
        out.push_back(std::move(s));
    }
    return out;
}

CurveOptions curve_options(const RunConfig& config) {
    CurveOptions o;
    o.methods = config.curve.methods;
    o.repeats = config.curve.repeats;
    o.schedule = config.curve.schedule;
    o.metric = config.curve.metric;
    o.retrain = config.curve.retrain;
    o.retrain_hyper = config.retrain_hyper();
    o.variance_keep = config.variance_keep;
    o.seed = derive_seed(config.seed, {0xC0E7});
    return o;
}

CurveGrid curve_stage(const RunConfig& config, std::span<const SensorNetworks> sensors) {
    const CurveOptions options = curve_options(config);
    if (sensors.size() >= 2) return run_grid(sensors, options);
    if (sensors.empty() || sensors.front().same_sensor_partners.empty())
        throw UsageError("curve: need a sensor with at least two initializations");
    CurveOptions cell = options;
    cell.seed = derive_seed(options.seed, {0, 0});
    cell.basis_sensor = sensors.front().name + "(init)";
    cell.evaluated_sensor = sensors.front().name;
    return {{run_curve(sensors.front().main, sensors.front().same_sensor_partners, cell)}};
}

FusionReport fusion_stage(const RunConfig& config, const SensorNetworks& first, const SensorNetworks& second) {
    TrainHyper hyper = config.train;
    hyper.seed = derive_seed(config.seed, {0xF05E});
    return equivalence_test(first.main, second.main, config.fusion_k, hyper, config.variance_keep);
}

void write_dataset(const std::filesystem::path& dir, const SyntheticDataset& data, std::uint64_t seed) {
    for (const SensorSplit& s : data.sensors) {
        io::save_features(dir / (s.name + "_train.ccap"), s.train, s.name, seed);
        io::save_features(dir / (s.name + "_val.ccap"), s.val, s.name, seed);
    }
}

SyntheticDataset read_dataset(const std::filesystem::path& dir, const RunConfig& config) {
    SyntheticDataset data;
    data.n_classes = config.dataset.n_classes;
    for (std::size_t m = 0; m < config.dataset.sensors.size(); ++m) {
        SensorSplit s;
        const std::string& configured = config.dataset.sensors[m].name;
        s.name = configured.empty() ? "sensor" + std::to_string(m) : configured;
        s.train = io::load_features(dir / (s.name + "_train.ccap"));
        s.val = io::load_features(dir / (s.name + "_val.ccap"));
        validate(s.train, data.n_classes);
        validate(s.val, data.n_classes);
        data.sensors.push_back(std::move(s));
    }
    return data;
}

std::filesystem::path network_stem(const std::filesystem::path& dir, const std::string& sensor, int init) {
    return dir / (sensor + "_init" + std::to_string(init));
}

void write_networks(const std::filesystem::path& dir, std::span<const TrainedSensor> trained) {
    for (const TrainedSensor& t : trained)
        for (std::size_t i = 0; i < t.inits.size(); ++i) {
            const TrainedNetwork& net = t.inits[i];
            const std::string stem = network_stem(dir, t.name, static_cast<int>(i)).string();
            io::save_model(stem + ".model", net.model, net.seed);
            io::save_features(stem + "_train.ccap", net.features.train, t.name, net.seed);
            io::save_features(stem + "_val.ccap", net.features.val, t.name, net.seed);
            io::save_head(stem + "_head.ccap", net.features.head, t.name);
        }
}

std::vector<SensorNetworks> read_networks(const std::filesystem::path& dir, const RunConfig& config) {
    std::vector<SensorNetworks> out;
    for (std::size_t m = 0; m < config.dataset.sensors.size(); ++m) {
        SensorNetworks s;
        const std::string& configured = config.dataset.sensors[m].name;
        s.name = configured.empty() ? "sensor" + std::to_string(m) : configured;
        for (int i = 0; i < config.inits; ++i) {
            const std::string stem = network_stem(dir, s.name, i).string();
            NetworkFeatures f{io::load_features(stem + "_train.ccap"), io::load_features(stem + "_val.ccap"),
                              io::load_head(stem + "_head.ccap")};
            if (i == 0) {
                s.main = std::move(f);
            } else {
                s.same_sensor_partners.push_back(std::move(f.train.features));
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<std::filesystem::path> write_curves(const std::filesystem::path& dir, const CurveGrid& grid,
                                                std::span<const SensorNetworks> sensors, const RunConfig& config) {
    std::vector<std::filesystem::path> written;
    for (std::size_t p = 0; p < grid.size(); ++p)
        for (std::size_t e = 0; e < grid[p].size(); ++e) {
            const std::string stem = "curve_" + sensors[p].name + "__" + sensors[e].name;
            const std::vector<CurveResult>& curves = grid[p][e];
            write_text(dir / (stem + ".csv"), report::curves_csv(curves, config.curve.metric));
            const std::string title = "CCA from " + curves.front().basis_sensor + ", evaluated on " + sensors[e].name;
            write_text(dir / (stem + ".svg"), curves_svg(curves, config.dataset.n_classes, title));
            written.push_back(dir / (stem + ".csv"));
        }
    return written;
}

void write_fusion(const std::filesystem::path& dir, const FusionReport& report, const std::string& first,
                  const std::string& second) {
    const std::string stem = "fusion_" + first + "__" + second;
    write_text(dir / (stem + ".csv"), report::fusion_csv(report, first, second));
    write_text(dir / (stem + ".txt"), report::fusion_text(report, first, second));
}

PipelineResult run_pipeline(const RunConfig& config, const std::filesystem::path& out_dir) {
    const SyntheticDataset data = generate_stage(config);
    write_dataset(out_dir / "data", data, config.seed);
    const std::vector<TrainedSensor> trained = train_stage(config, data);
    write_networks(out_dir / "nets", trained);

    PipelineResult result;
    result.sensors = sensor_networks(trained);
    result.grid = curve_stage(config, result.sensors);
    write_curves(out_dir / "curves", result.grid, result.sensors, config);
    if (result.sensors.size() >= 2) {
        result.fusion = fusion_stage(config, result.sensors[0], result.sensors[1]);
        write_fusion(out_dir / "fusion", result.fusion, result.sensors[0].name, result.sensors[1].name);
    }
    return result;
}

}  // namespace ccaprobe
