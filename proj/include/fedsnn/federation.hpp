#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fedsnn/learner.hpp"
#include "fedsnn/network.hpp"
#include "fedsnn/spike_record.hpp"

namespace fedsnn {

// Scheduler parameters for one federated run. A sync_period larger than
// total_rounds disables synchronization entirely (separate training).
struct FederationConfig {
    std::size_t num_devices = 1;
    std::vector<std::size_t> dataset_sizes; // |D_i|, the averaging weights
    std::size_t sync_period = 1;            // tau
    std::size_t total_rounds = 1;           // T
    std::optional<double> topk_rate;        // r; empty = dense exchange

    // Synaptic weights uploaded per synapse per sync: round(r*tau), capped at
    // the kernel count.
    std::size_t topk_count(std::size_t num_basis) const;
    void validate(std::size_t num_basis) const;
};

// Dataset-size-weighted elementwise mean. Throws on an empty list or
// mismatched dimensions.
std::vector<double> fed_average(const std::vector<std::vector<double>>& thetas,
                                const std::vector<std::size_t>& dataset_sizes);

// Indices of the k largest magnitudes, ties broken toward the lower index;
// returned sorted ascending.
std::vector<std::size_t> select_topk(std::span<const double> magnitudes, std::size_t k);

// One device's sparse upload: bias/feedback entries for every neuron are
// always included; each synapse contributes at most k basis weights, chosen
// by the magnitude of the parameter movement since the last sync.
struct SparseUpdate {
    // (bias, feedback) per neuron, neuron-id order.
    std::vector<double> dense_values;

    struct SynapseSelection {
        std::vector<std::uint16_t> indices; // basis indices, sorted, distinct
        std::vector<double> values;         // current weights at those indices
    };
    // One entry per synapse: non-input neurons in id order, sources in
    // presynaptic order.
    std::vector<SynapseSelection> synapses;

    std::uint64_t value_count() const;
    std::uint64_t index_count() const;
};

SparseUpdate make_sparse_update(const Network& net, const ModelParams& current,
                                std::span<const double> reference, std::size_t k);

// Base-station merge of sparse uploads: bias/feedback densely averaged;
// a synaptic weight sent by several devices is their dataset-size-weighted
// mean, sent by one device it is taken verbatim, sent by none it becomes 0.
std::vector<double> sparse_merge(const Network& net,
                                 const std::vector<SparseUpdate>& updates,
                                 const std::vector<std::size_t>& dataset_sizes);

// Uplink/downlink accounting in parameter-entry units. Uploaded indices are
// the sparse-selection position overhead.
struct CommStats {
    std::uint64_t uploaded_values = 0;
    std::uint64_t uploaded_indices = 0;
    std::uint64_t broadcast_values = 0;
    std::uint64_t uploaded_total() const { return uploaded_values + uploaded_indices; }
};

struct DeviceData {
    SpikeRecord inputs;  // N_X x S
    SpikeRecord targets; // N_Y x S
};

struct RoundRecord {
    std::size_t round = 0;
    bool synced = false;
    std::vector<double> learning_signals;           // per device
    std::vector<std::uint64_t> uploaded_per_device; // cumulative values+indices
};

struct TrainingResult {
    std::vector<ModelParams> device_params;
    ModelParams dense_average;
    // Set only when the last round was a sync; then all devices equal it.
    std::optional<ModelParams> synced_global;
    std::vector<RoundRecord> history;
    CommStats comm;
};

// Called after each completed round (post-sync when the round synced).
using RoundHook = std::function<void(std::size_t round, const std::vector<Learner>& learners,
                                     const CommStats& comm)>;

// Algorithm: every device runs one local round per global step; every
// sync_period rounds all devices upload (dense or sparse), the merged
// parameters are broadcast and adopted by everyone. Device i's stream is
// seeded with global_seed ^ i. Streams must hold exactly
// total_rounds * window_len steps.
TrainingResult run_federated_training(std::shared_ptr<const Network> net,
                                      const FederationConfig& config,
                                      const Hyperparams& hyper, const ModelParams& initial,
                                      const std::vector<DeviceData>& data,
                                      std::uint64_t global_seed,
                                      const RoundHook& hook = {});

// Plain single-device loop with no base station, for baselines and
// equivalence checks.
void run_standalone_training(std::shared_ptr<const Network> net, const Hyperparams& hyper,
                             const ModelParams& initial, const DeviceData& data,
                             std::uint64_t seed, std::size_t rounds,
                             const std::function<void(std::size_t, const Learner&)>& hook);

} // namespace fedsnn
