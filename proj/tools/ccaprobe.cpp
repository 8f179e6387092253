// ccaprobe: command-line front end for the CCA probing toolkit.

#include "ccaprobe/cca.hpp"
#include "ccaprobe/config.hpp"
#include "ccaprobe/error.hpp"
#include "ccaprobe/feature_file.hpp"
#include "ccaprobe/pipeline.hpp"
#include "ccaprobe/report.hpp"
#include "ccaprobe/similarity.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace ccaprobe;

namespace {

struct Common {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::string out;
    int threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool out_required = true) {
    cmd->add_option("--seed", c.seed, "Master seed (overrides the config)");
    cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
    auto* out = cmd->add_option("--out", c.out, "Output path");
    if (out_required) out->required();
    cmd->add_option("--threads", c.threads, "OpenMP thread count (0 = runtime default)");
}

RunConfig resolve(const Common& c) {
    RunConfig config = c.config.empty() ? parse_config(default_config_json(c.seed.value_or(0))) : load_config(c.config);
    if (c.seed) config.seed = *c.seed;
    if (c.threads > 0) omp_set_num_threads(c.threads);
    return config;
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

const SensorNetworks& find_sensor(const std::vector<SensorNetworks>& sensors, const std::string& name) {
    for (const SensorNetworks& s : sensors)
        if (s.name == name) return s;
    throw UsageError("unknown sensor '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probe CCA components of trained networks against their classification layers"};
    app.require_subcommand(1);

    // gen-data
    Common gen;
    std::optional<int> classes, samples, shared_dim, nuisance_dim;
    std::optional<double> noise;
    std::vector<double> informativeness;
    auto* gen_cmd = app.add_subcommand("gen-data", "Synthesize an aligned multi-sensor dataset");
    add_common(gen_cmd, gen);
    gen_cmd->add_option("--classes", classes, "Class count");
    gen_cmd->add_option("--samples", samples, "Total samples (train + val)");
    gen_cmd->add_option("--shared-dim", shared_dim, "Class latent dimension");
    gen_cmd->add_option("--nuisance-dim", nuisance_dim, "Private nuisance dimensions per sensor");
    gen_cmd->add_option("--noise", noise, "Observation noise sigma");
    gen_cmd->add_option("--informativeness", informativeness, "Per-sensor informativeness (one value per sensor)");

    // train
    Common train;
    std::string train_data;
    auto* train_cmd = app.add_subcommand("train", "Train per-sensor MLPs; write models, features and heads");
    add_common(train_cmd, train);
    train_cmd->add_option("--data", train_data, "Directory written by gen-data")->required()->check(CLI::ExistingDirectory);

    // extract
    Common extract;
    std::string model_path, raw_path, extract_name = "features";
    bool extract_csv = false;
    auto* extract_cmd = app.add_subcommand("extract", "Penultimate features and head from a saved model");
    add_common(extract_cmd, extract);
    extract_cmd->add_option("--model", model_path, "Saved model")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("--input", raw_path, "Raw input feature file (.ccap or .csv)")->required()->check(CLI::ExistingFile);
    extract_cmd->add_option("--name", extract_name, "Record name for the outputs");
    extract_cmd->add_flag("--csv", extract_csv, "Also write CSV copies");

    // cca
    Common cca_opts;
    std::string x1_path, x2_path;
    double variance_keep = kDefaultVarianceKeep;
    auto* cca_cmd = app.add_subcommand("cca", "Fit CCA between two aligned feature files; print rho");
    add_common(cca_cmd, cca_opts);
    cca_cmd->add_option("--x1", x1_path, "Side-1 features")->required()->check(CLI::ExistingFile);
    cca_cmd->add_option("--x2", x2_path, "Side-2 features")->required()->check(CLI::ExistingFile);
    cca_cmd->add_option("--variance-keep", variance_keep, "PCA pre-step variance fraction");

    // curve
    Common curve;
    std::string curve_nets;
    auto* curve_cmd = app.add_subcommand("curve", "Projection-performance curves (CSV + SVG per sensor pair)");
    add_common(curve_cmd, curve);
    curve_cmd->add_option("--nets", curve_nets, "Directory written by train")->required()->check(CLI::ExistingDirectory);

    // fuse
    Common fuse;
    std::string fuse_nets, first_name, second_name;
    std::optional<Index> fuse_k;
    auto* fuse_cmd = app.add_subcommand("fuse", "CCA fusion vs logit sum vs probability averaging");
    add_common(fuse_cmd, fuse);
    fuse_cmd->add_option("--nets", fuse_nets, "Directory written by train")->required()->check(CLI::ExistingDirectory);
    fuse_cmd->add_option("--first", first_name, "First sensor (default: first configured)");
    fuse_cmd->add_option("--second", second_name, "Second sensor (default: second configured)");
    fuse_cmd->add_option("--k", fuse_k, "Summed canonical pairs (default: class count)");

    // similarity
    Common sim;
    std::string s1_path, s2_path;
    auto* sim_cmd = app.add_subcommand("similarity", "mean CCA, SVCCA, PWCCA and linear CKA of two feature files");
    add_common(sim_cmd, sim);
    sim_cmd->add_option("--x1", s1_path, "Side-1 features")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--x2", s2_path, "Side-2 features")->required()->check(CLI::ExistingFile);

    // run
    Common run;
    auto* run_cmd = app.add_subcommand("run", "Full pipeline: gen-data, train, curve, fuse");
    add_common(run_cmd, run);

    // config
    Common cfg;
    auto* cfg_cmd = app.add_subcommand("config", "Write the default configuration as JSON");
    add_common(cfg_cmd, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*gen_cmd) {
            RunConfig config = resolve(gen);
            if (classes) config.dataset.n_classes = *classes;
            if (samples) config.dataset.n_samples = *samples;
            if (shared_dim) config.dataset.shared_dim = *shared_dim;
            if (noise) config.dataset.noise_sigma = *noise;
            if (nuisance_dim)
                for (SensorSpec& s : config.dataset.sensors) s.nuisance_dim = *nuisance_dim;
            if (!informativeness.empty()) {
                config.dataset.sensors.resize(informativeness.size());
                for (std::size_t m = 0; m < informativeness.size(); ++m) {
                    if (config.dataset.sensors[m].name.empty())
                        config.dataset.sensors[m].name = "sensor" + std::to_string(m);
                    config.dataset.sensors[m].informativeness = informativeness[m];
                }
            }
            const SyntheticDataset data = generate_stage(config);
            write_dataset(gen.out, data, config.seed);
            for (const SensorSplit& s : data.sensors)
                std::cout << s.name << ": " << s.train.size() << " train / " << s.val.size() << " val, "
                          << s.train.features.cols() << " raw features\n";
        } else if (*train_cmd) {
            const RunConfig config = resolve(train);
            const SyntheticDataset data = read_dataset(train_data, config);
            const std::vector<TrainedSensor> trained = train_stage(config, data);
            write_networks(train.out, trained);
            for (const TrainedSensor& t : trained)
                for (std::size_t i = 0; i < t.inits.size(); ++i)
                    std::cout << t.name << " init " << i << ": val accuracy "
                              << evaluate(t.inits[i].features.head, t.inits[i].features.val, Metric::accuracy) << "\n";
        } else if (*extract_cmd) {
            resolve(extract);
            const MlpModel model = io::load_model(model_path);
            const io::FeatureRecord raw = io::read_any(raw_path);
            const Extraction ex = extract_features(model, raw.values);
            const fs::path out(extract.out);
            const io::FeatureRecord rec{extract_name, raw.seed, ex.features, raw.labels};
            io::write_records(out / (extract_name + ".ccap"), std::span(&rec, 1));
            io::save_head(out / (extract_name + "_head.ccap"), ex.head, extract_name);
            if (extract_csv) {
                io::write_csv(out / (extract_name + ".csv"), rec);
                io::write_csv(out / (extract_name + "_head.csv"), io::head_record(ex.head, extract_name));
            }
            std::cout << "features " << ex.features.rows() << " x " << ex.features.cols() << ", head "
                      << ex.head.classes() << " x " << ex.head.features() << "\n";
        } else if (*cca_cmd) {
            resolve(cca_opts);
            const CcaBasis basis = fit_cca(io::read_any(x1_path).values, io::read_any(x2_path).values, variance_keep);
            io::save_basis(cca_opts.out, basis);
            std::cout << report::rho_text(basis.rho);
        } else if (*curve_cmd) {
            const RunConfig config = resolve(curve);
            const std::vector<SensorNetworks> sensors = read_networks(curve_nets, config);
            const CurveGrid grid = curve_stage(config, sensors);
            for (const fs::path& p : write_curves(curve.out, grid, sensors, config)) std::cout << p.string() << "\n";
        } else if (*fuse_cmd) {
            RunConfig config = resolve(fuse);
            if (fuse_k) config.fusion_k = *fuse_k;
            const std::vector<SensorNetworks> sensors = read_networks(fuse_nets, config);
            if (sensors.size() < 2 && (first_name.empty() || second_name.empty()))
                throw UsageError("fuse: need two sensors");
            const SensorNetworks& a = first_name.empty() ? sensors[0] : find_sensor(sensors, first_name);
            const SensorNetworks& b = second_name.empty() ? sensors[1] : find_sensor(sensors, second_name);
            const FusionReport r = fusion_stage(config, a, b);
            write_fusion(fuse.out, r, a.name, b.name);
            std::cout << report::fusion_text(r, a.name, b.name);
        } else if (*sim_cmd) {
            resolve(sim);
            const SimilarityReport r = similarity_report(io::read_any(s1_path).values, io::read_any(s2_path).values);
            write_text(fs::path(sim.out) / "similarity.csv", report::similarity_csv(r));
            write_text(fs::path(sim.out) / "similarity.txt", report::similarity_text(r));
            std::cout << report::similarity_text(r);
        } else if (*run_cmd) {
            const RunConfig config = resolve(run);
            const PipelineResult r = run_pipeline(config, run.out);
            if (r.sensors.size() >= 2) std::cout << report::fusion_text(r.fusion, r.sensors[0].name, r.sensors[1].name);
        } else if (*cfg_cmd) {
            const RunConfig config = resolve(cfg);
            write_text(cfg.out, default_config_json(config.seed));
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
