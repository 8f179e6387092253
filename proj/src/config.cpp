#include "ccaprobe/config.hpp"

#include "ccaprobe/error.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ccaprobe {
namespace {

using nlohmann::json;

void allow_only(const json& object, std::string_view where, std::initializer_list<std::string_view> keys) {
    if (!object.is_object()) throw UsageError("config: '" + std::string(where) + "' must be an object");
    const std::set<std::string_view> allowed(keys);
    for (const auto& [key, value] : object.items())
        if (!allowed.count(key)) throw UsageError("config: unknown key '" + std::string(where) + "." + key + "'");
}

template <typename T>
void read(const json& object, const char* key, T& target) {
    if (!object.contains(key)) return;
    try {
        target = object.at(key).get<T>();
    } catch (const json::exception& e) {
        throw UsageError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

SensorSpec parse_sensor(const json& j) {
    allow_only(j, "dataset.sensors[]", {"name", "informativeness", "nuisance_dim", "map_seed"});
    SensorSpec s;
    read(j, "name", s.name);
    read(j, "informativeness", s.informativeness);
    read(j, "nuisance_dim", s.nuisance_dim);
    if (j.contains("map_seed")) {
        std::uint64_t seed = 0;
        read(j, "map_seed", seed);
        s.map_seed = seed;
    }
    return s;
}

void parse_dataset(const json& j, SyntheticSpec& spec) {
    allow_only(j, "dataset",
               {"n_classes", "shared_dim", "class_separation", "within_class_sigma", "noise_sigma", "nuisance_sigma",
                "n_samples", "val_fraction", "sensors"});
    read(j, "n_classes", spec.n_classes);
    read(j, "shared_dim", spec.shared_dim);
    read(j, "class_separation", spec.class_separation);
    read(j, "within_class_sigma", spec.within_class_sigma);
    read(j, "noise_sigma", spec.noise_sigma);
    read(j, "nuisance_sigma", spec.nuisance_sigma);
    read(j, "n_samples", spec.n_samples);
    read(j, "val_fraction", spec.val_fraction);
    if (j.contains("sensors")) {
        if (!j["sensors"].is_array()) throw UsageError("config: 'dataset.sensors' must be an array");
        spec.sensors.clear();
        for (const json& s : j["sensors"]) spec.sensors.push_back(parse_sensor(s));
    }
}

void parse_train(const json& j, TrainHyper& hyper) {
    allow_only(j, "train", {"lr", "epochs", "batch", "weight_decay"});
    read(j, "lr", hyper.lr);
    read(j, "epochs", hyper.epochs);
    read(j, "batch", hyper.batch);
    read(j, "weight_decay", hyper.weight_decay);
}

void parse_curve(const json& j, CurveConfig& curve) {
    allow_only(j, "curve", {"methods", "repeats", "schedule", "metric", "retrain", "retrain_epochs"});
    if (j.contains("methods")) {
        std::vector<std::string> names;
        read(j, "methods", names);
        curve.methods.clear();
        for (const std::string& n : names) curve.methods.push_back(method_from_string(n));
    }
    read(j, "repeats", curve.repeats);
    if (j.contains("schedule")) {
        std::vector<Index> schedule;
        read(j, "schedule", schedule);
        curve.schedule = std::move(schedule);
    }
    if (j.contains("metric")) {
        std::string metric;
        read(j, "metric", metric);
        curve.metric = metric_from_string(metric);
    }
    read(j, "retrain", curve.retrain);
    if (j.contains("retrain_epochs")) {
        int epochs = 0;
        read(j, "retrain_epochs", epochs);
        curve.retrain_epochs = epochs;
    }
}

void check(const RunConfig& c) {
    validate(c.dataset);
    if (c.hidden.empty()) throw UsageError("config: network.hidden needs at least one layer");
    for (Index h : c.hidden)
        if (h < 1) throw UsageError("config: hidden sizes must be positive");
    if (c.inits < 2) throw UsageError("config: network.inits must be >= 2 (same-sensor CCA needs a partner)");
    if (!(c.train.lr > 0.0) || c.train.epochs < 0 || c.train.batch < 1)
        throw UsageError("config: invalid training hyperparameters");
    if (c.curve.repeats < 1) throw UsageError("config: curve.repeats must be >= 1");
    if (c.curve.methods.empty()) throw UsageError("config: curve.methods is empty");
    if (c.curve.retrain_epochs && *c.curve.retrain_epochs < 0) throw UsageError("config: retrain_epochs < 0");
    if (c.fusion_k && *c.fusion_k < 1) throw UsageError("config: fusion.k must be >= 1");
    if (!(c.variance_keep > 0.0 && c.variance_keep <= 1.0)) throw UsageError("config: variance_keep outside (0, 1]");
}

}  // namespace

TrainHyper RunConfig::retrain_hyper() const {
    TrainHyper h = train;
    if (curve.retrain_epochs) h.epochs = *curve.retrain_epochs;
    return h;
}

RunConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config: invalid JSON: ") + e.what());
    }
    allow_only(j, "config", {"seed", "output_dir", "dataset", "network", "train", "curve", "fusion", "variance_keep"});
    if (!j.contains("seed")) throw UsageError("config: 'seed' is mandatory");

    RunConfig c;
    read(j, "seed", c.seed);
    if (j.contains("output_dir")) {
        std::string dir;
        read(j, "output_dir", dir);
        c.output_dir = dir;
    }
    if (j.contains("dataset")) parse_dataset(j["dataset"], c.dataset);
    if (j.contains("network")) {
        allow_only(j["network"], "network", {"hidden", "inits"});
        read(j["network"], "hidden", c.hidden);
        read(j["network"], "inits", c.inits);
    }
    if (j.contains("train")) parse_train(j["train"], c.train);
    if (j.contains("curve")) parse_curve(j["curve"], c.curve);
    if (j.contains("fusion")) {
        allow_only(j["fusion"], "fusion", {"k"});
        if (j["fusion"].contains("k") && !j["fusion"]["k"].is_null()) {
            Index k = 0;
            read(j["fusion"], "k", k);
            c.fusion_k = k;
        }
    }
    read(j, "variance_keep", c.variance_keep);
    check(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string default_config_json(std::uint64_t seed) {
    const RunConfig c;
    json sensors = json::array();
    for (const SensorSpec& s : c.dataset.sensors)
        sensors.push_back({{"name", s.name}, {"informativeness", s.informativeness}, {"nuisance_dim", s.nuisance_dim}});
    std::vector<std::string> methods;
    for (Method m : c.curve.methods) methods.emplace_back(to_string(m));
    const json j = {
        {"seed", seed},
        {"output_dir", c.output_dir.string()},
        {"dataset",
         {{"n_classes", c.dataset.n_classes},
          {"shared_dim", c.dataset.shared_dim},
          {"class_separation", c.dataset.class_separation},
          {"within_class_sigma", c.dataset.within_class_sigma},
          {"noise_sigma", c.dataset.noise_sigma},
          {"nuisance_sigma", c.dataset.nuisance_sigma},
          {"n_samples", c.dataset.n_samples},
          {"val_fraction", c.dataset.val_fraction},
          {"sensors", sensors}}},
        {"network", {{"hidden", c.hidden}, {"inits", c.inits}}},
        {"train",
         {{"lr", c.train.lr}, {"epochs", c.train.epochs}, {"batch", c.train.batch},
          {"weight_decay", c.train.weight_decay}}},
        {"curve",
         {{"methods", methods},
          {"repeats", c.curve.repeats},
          {"metric", std::string(to_string(c.curve.metric))},
          {"retrain", c.curve.retrain}}},
        {"fusion", {{"k", nullptr}}},
        {"variance_keep", c.variance_keep},
    };
    return j.dump(2) + "\n";
}

}  // namespace ccaprobe
