#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "fedsnn/config.hpp"
#include "fedsnn/errors.hpp"
#include "fedsnn/experiment.hpp"
#include "fedsnn/log.hpp"

namespace {

fedsnn::RunConfig load(const std::string& path, const std::string& out_override) {
    fedsnn::RunConfig cfg = fedsnn::parse_config(path);
    if (!out_override.empty()) {
        cfg.out = out_override;
    }
    return cfg;
}

void print_summary(const fedsnn::ExperimentOutcome& outcome) {
    fedsnn::log_info("mean final accuracy " + std::to_string(outcome.mean_accuracy) +
                     ", mean final log-loss " + std::to_string(outcome.mean_log_loss));
    if (!outcome.loss_ratio.empty()) {
        fedsnn::log_info("mean loss ratio vs separate baseline " +
                         std::to_string(outcome.mean_loss_ratio));
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated training of probabilistic spiking networks"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::string sweep_key = "tau";
    std::vector<double> sweep_values;
    bool sequential = false;

    CLI::App* cmd_run = app.add_subcommand("run", "Train per the config and write CSV metrics");
    cmd_run->add_option("config", config_path, "config file")->required();
    cmd_run->add_option("--out", out_override, "override the config's output directory");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "Run one experiment per sweep value");
    cmd_sweep->add_option("config", config_path, "config file")->required();
    cmd_sweep->add_option("--key", sweep_key, "tau or rate")->required();
    cmd_sweep->add_option("--values", sweep_values, "comma-separated sweep values")
        ->required()
        ->delimiter(',');
    cmd_sweep->add_option("--out", out_override, "override the config's output directory");
    cmd_sweep->add_flag("--sequential", sequential, "disable parallel sweep execution");

    CLI::App* cmd_gen = app.add_subcommand("gen-data",
                                           "Write the config's synthetic dataset as raster files");
    cmd_gen->add_option("config", config_path, "config file")->required();
    cmd_gen->add_option("--out", out_override, "override the config's output directory");

    CLI::App* cmd_base = app.add_subcommand("baseline",
                                            "Train with synchronization disabled");
    cmd_base->add_option("config", config_path, "config file")->required();
    cmd_base->add_option("--out", out_override, "override the config's output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            const fedsnn::RunConfig cfg = load(config_path, out_override);
            print_summary(fedsnn::run_experiment(cfg, cfg.out));
        } else if (cmd_sweep->parsed()) {
            const fedsnn::RunConfig cfg = load(config_path, out_override);
            fedsnn::SweepKey key;
            if (sweep_key == "tau") {
                key = fedsnn::SweepKey::tau;
            } else if (sweep_key == "rate") {
                key = fedsnn::SweepKey::rate;
            } else {
                throw fedsnn::ConfigError("sweep key must be 'tau' or 'rate'");
            }
            fedsnn::run_sweep(cfg, key, sweep_values, cfg.out, !sequential);
            fedsnn::log_info("sweep finished, summary at " + cfg.out + "/sweep_summary.csv");
        } else if (cmd_gen->parsed()) {
            const fedsnn::RunConfig cfg = load(config_path, out_override);
            fedsnn::generate_dataset_files(cfg, cfg.out);
        } else if (cmd_base->parsed()) {
            const fedsnn::RunConfig cfg =
                fedsnn::baseline_variant(load(config_path, out_override));
            print_summary(fedsnn::run_experiment(cfg, cfg.out));
        }
    } catch (const fedsnn::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
