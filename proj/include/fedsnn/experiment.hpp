#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fedsnn/config.hpp"
#include "fedsnn/data.hpp"
#include "fedsnn/federation.hpp"
#include "fedsnn/network.hpp"

namespace fedsnn {

// Encoded test set shared by every model under evaluation.
struct TestSet {
    std::vector<EncodedExample> examples;
    std::vector<std::uint16_t> labels;
};

struct EvalResult {
    double log_loss = 0.0;
    double accuracy = 0.0;
};

// Rate decoding: predicted class = argmax of output spike counts, ties to the
// lowest index.
std::size_t argmax_class(std::span<const std::size_t> counts);

// Free-running classification of one input raster: inputs clamped, hidden and
// output neurons sampled, outputs decoded by spike count.
std::size_t classify(const Network& net, const ModelParams& params,
                     const SpikeRecord& inputs, RngStream& rng);

// Mean test log-loss and accuracy of one model over the test set.
EvalResult evaluate_model(const Network& net, const ModelParams& params, const TestSet& test,
                          std::size_t num_samples, std::uint64_t eval_seed);

struct MetricsRow {
    std::size_t round = 0;
    int device = 0; // -1 = dataset-size-weighted average of the device models
    double learning_signal = 0.0;
    double test_log_loss = 0.0;
    double test_accuracy = 0.0;
    std::uint64_t uploaded_entries = 0;
};

struct ExperimentOutcome {
    std::vector<EvalResult> final_per_device;
    EvalResult final_average_model;
    std::vector<EvalResult> baseline;  // per device; empty unless baseline ran
    std::vector<double> baseline_loss; // per device; empty unless baseline ran
    std::vector<double> loss_ratio;    // per device; empty unless baseline ran
    double mean_accuracy = 0.0;
    double mean_log_loss = 0.0;
    double mean_loss_ratio = 0.0; // nan unless baseline ran
    CommStats comm;
    std::vector<MetricsRow> metrics;
};

// Full experiment: build the network and data from the config, train
// federated (plus the no-sync baseline when enabled), evaluate every
// eval_every rounds and at the end, and write metrics.csv + summary.csv
// under out_dir. Deterministic in the config seed.
ExperimentOutcome run_experiment(const RunConfig& config,
                                 const std::filesystem::path& out_dir);

enum class SweepKey { tau, rate };

struct SweepRow {
    double value = 0.0;
    double mean_final_accuracy = 0.0;
    double mean_final_log_loss = 0.0;
    double mean_final_loss_ratio = 0.0;
    std::uint64_t total_uploaded_entries = 0;
};

// One experiment per value (fresh, identical seed), each in its own
// subdirectory; writes sweep_summary.csv with one row per value. Points run
// concurrently when parallel is set; results are identical either way.
std::vector<SweepRow> run_sweep(const RunConfig& config, SweepKey key,
                                const std::vector<double>& values,
                                const std::filesystem::path& out_dir, bool parallel = true);

// The separate-training variant of the config: synchronization disabled,
// baseline comparison off.
RunConfig baseline_variant(RunConfig config);

// Emit the config's synthetic dataset as raster files (one train file per
// device plus test.sras) under out_dir.
void generate_dataset_files(const RunConfig& config, const std::filesystem::path& out_dir);

} // namespace fedsnn
