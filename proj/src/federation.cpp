#include "fedsnn/federation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fedsnn/errors.hpp"

namespace fedsnn {

std::size_t FederationConfig::topk_count(std::size_t num_basis) const {
    if (!topk_rate) {
        return num_basis;
    }
    const double raw = std::round(*topk_rate * static_cast<double>(sync_period));
    const auto k = static_cast<std::size_t>(raw);
    return std::min(std::max<std::size_t>(k, 1), num_basis);
}

void FederationConfig::validate(std::size_t num_basis) const {
    if (num_devices < 1) {
        throw ConfigError("federation: at least one device required");
    }
    if (dataset_sizes.size() != num_devices) {
        throw ConfigError("federation: dataset_sizes count " +
                          std::to_string(dataset_sizes.size()) + " != num_devices " +
                          std::to_string(num_devices));
    }
    if (sync_period < 1) {
        throw ConfigError("federation: sync_period must be >= 1");
    }
    if (total_rounds < 1) {
        throw ConfigError("federation: total_rounds must be >= 1");
    }
    if (topk_rate) {
        if (*topk_rate <= 0.0) {
            throw ConfigError("federation: sparse rate must be > 0");
        }
        const double raw = std::round(*topk_rate * static_cast<double>(sync_period));
        if (raw < 1.0) {
            throw ConfigError("federation: rate * sync_period rounds below 1 weight "
                              "per synapse per sync");
        }
        (void)num_basis;
    }
}

std::vector<double> fed_average(const std::vector<std::vector<double>>& thetas,
                                const std::vector<std::size_t>& dataset_sizes) {
    if (thetas.empty()) {
        throw ConfigError("fed_average: empty update list");
    }
    if (dataset_sizes.size() != thetas.size()) {
        throw DimensionError("fed_average: " + std::to_string(dataset_sizes.size()) +
                             " weights for " + std::to_string(thetas.size()) + " updates");
    }
    const std::size_t dim = thetas.front().size();
    double total = 0.0;
    for (std::size_t w : dataset_sizes) {
        total += static_cast<double>(w);
    }
    if (total <= 0.0) {
        throw ConfigError("fed_average: dataset sizes sum to zero");
    }

    std::vector<double> merged(dim, 0.0);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        if (thetas[i].size() != dim) {
            throw DimensionError("fed_average: update " + std::to_string(i) + " has " +
                                 std::to_string(thetas[i].size()) + " entries, expected " +
                                 std::to_string(dim));
        }
        const double weight = static_cast<double>(dataset_sizes[i]) / total;
        for (std::size_t j = 0; j < dim; ++j) {
            merged[j] += weight * thetas[i][j];
        }
    }
    return merged;
}

std::vector<std::size_t> select_topk(std::span<const double> magnitudes, std::size_t k) {
    std::vector<std::size_t> order(magnitudes.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return magnitudes[a] > magnitudes[b];
    });
    order.resize(std::min(k, order.size()));
    std::sort(order.begin(), order.end());
    return order;
}

std::uint64_t SparseUpdate::value_count() const {
    std::uint64_t count = dense_values.size();
    for (const auto& synapse : synapses) {
        count += synapse.values.size();
    }
    return count;
}

std::uint64_t SparseUpdate::index_count() const {
    std::uint64_t count = 0;
    for (const auto& synapse : synapses) {
        count += synapse.indices.size();
    }
    return count;
}

SparseUpdate make_sparse_update(const Network& net, const ModelParams& current,
                                std::span<const double> reference, std::size_t k) {
    const ParamLayout& layout = *net.layout;
    if (reference.size() != layout.total_size()) {
        throw DimensionError("sparse update: reference size mismatch");
    }
    const std::size_t num_basis = net.basis.num_basis;
    const std::size_t num_neurons = net.topology.num_neurons();

    SparseUpdate update;
    update.dense_values.reserve(2 * num_neurons);
    for (std::size_t n = 0; n < num_neurons; ++n) {
        update.dense_values.push_back(current.theta[layout.bias_index(n)]);
        update.dense_values.push_back(current.theta[layout.feedback_index(n)]);
    }

    std::vector<double> magnitudes(num_basis);
    for (std::size_t n = 0; n < num_neurons; ++n) {
        for (std::size_t j = 0; j < layout.num_presynaptic(n); ++j) {
            for (std::size_t l = 0; l < num_basis; ++l) {
                const std::size_t idx = layout.synapse_index(n, j, l);
                magnitudes[l] = std::abs(current.theta[idx] - reference[idx]);
            }
            SparseUpdate::SynapseSelection selection;
            for (std::size_t l : select_topk(magnitudes, k)) {
                selection.indices.push_back(static_cast<std::uint16_t>(l));
                selection.values.push_back(current.theta[layout.synapse_index(n, j, l)]);
            }
            update.synapses.push_back(std::move(selection));
        }
    }
    return update;
}

std::vector<double> sparse_merge(const Network& net, const std::vector<SparseUpdate>& updates,
                                 const std::vector<std::size_t>& dataset_sizes) {
    if (updates.empty()) {
        throw ConfigError("sparse_merge: empty update list");
    }
    if (dataset_sizes.size() != updates.size()) {
        throw DimensionError("sparse_merge: weight count mismatch");
    }
    const ParamLayout& layout = *net.layout;
    const std::size_t num_basis = net.basis.num_basis;
    const std::size_t num_neurons = net.topology.num_neurons();

    std::size_t synapse_slots = 0;
    for (std::size_t n = 0; n < num_neurons; ++n) {
        synapse_slots += layout.num_presynaptic(n);
    }
    for (const auto& update : updates) {
        if (update.dense_values.size() != 2 * num_neurons ||
            update.synapses.size() != synapse_slots) {
            throw DimensionError("sparse_merge: update does not match the topology");
        }
    }

    std::vector<double> merged(layout.total_size(), 0.0);

    // Bias/feedback: everyone sends them, plain weighted average.
    double total = 0.0;
    for (std::size_t w : dataset_sizes) {
        total += static_cast<double>(w);
    }
    for (std::size_t n = 0; n < num_neurons; ++n) {
        double bias = 0.0;
        double feedback = 0.0;
        for (std::size_t i = 0; i < updates.size(); ++i) {
            const double weight = static_cast<double>(dataset_sizes[i]) / total;
            bias += weight * updates[i].dense_values[2 * n];
            feedback += weight * updates[i].dense_values[2 * n + 1];
        }
        merged[layout.bias_index(n)] = bias;
        merged[layout.feedback_index(n)] = feedback;
    }

    // Synapses: weighted mean over senders, single sender verbatim, no
    // sender leaves the slot at zero.
    std::vector<double> slot_value(num_basis);
    std::vector<double> slot_weight(num_basis);
    std::size_t slot = 0;
    for (std::size_t n = 0; n < num_neurons; ++n) {
        for (std::size_t j = 0; j < layout.num_presynaptic(n); ++j, ++slot) {
            std::fill(slot_value.begin(), slot_value.end(), 0.0);
            std::fill(slot_weight.begin(), slot_weight.end(), 0.0);
            for (std::size_t i = 0; i < updates.size(); ++i) {
                const auto& selection = updates[i].synapses[slot];
                const double weight = static_cast<double>(dataset_sizes[i]) / total;
                for (std::size_t p = 0; p < selection.indices.size(); ++p) {
                    const std::size_t l = selection.indices[p];
                    slot_value[l] += weight * selection.values[p];
                    slot_weight[l] += weight;
                }
            }
            for (std::size_t l = 0; l < num_basis; ++l) {
                if (slot_weight[l] > 0.0) {
                    merged[layout.synapse_index(n, j, l)] = slot_value[l] / slot_weight[l];
                }
            }
        }
    }
    return merged;
}

TrainingResult run_federated_training(std::shared_ptr<const Network> net,
                                      const FederationConfig& config,
                                      const Hyperparams& hyper, const ModelParams& initial,
                                      const std::vector<DeviceData>& data,
                                      std::uint64_t global_seed, const RoundHook& hook) {
    config.validate(net->basis.num_basis);
    if (data.size() != config.num_devices) {
        throw ConfigError("federation: " + std::to_string(data.size()) +
                          " device data sets for " + std::to_string(config.num_devices) +
                          " devices");
    }
    const std::size_t expected_steps = config.total_rounds * hyper.window_len;
    for (const DeviceData& d : data) {
        if (d.inputs.num_steps() != expected_steps || d.targets.num_steps() != expected_steps) {
            throw ConfigError("federation: stream length " +
                              std::to_string(d.inputs.num_steps()) +
                              " != total_rounds * window_len = " +
                              std::to_string(expected_steps));
        }
    }

    std::vector<Learner> learners;
    learners.reserve(config.num_devices);
    for (std::size_t i = 0; i < config.num_devices; ++i) {
        learners.emplace_back(net, hyper, initial,
                              global_seed ^ static_cast<std::uint64_t>(i));
    }

    const bool sync_enabled = config.sync_period <= config.total_rounds;
    const std::size_t dim = net->layout->total_size();
    const std::size_t topk = config.topk_count(net->basis.num_basis);

    std::vector<double> last_global = initial.theta;
    CommStats comm;
    std::vector<std::uint64_t> uploaded_per_device(config.num_devices, 0);

    TrainingResult result;
    result.history.reserve(config.total_rounds);
    bool last_round_synced = false;

    for (std::size_t t = 1; t <= config.total_rounds; ++t) {
        std::vector<double> signals(config.num_devices);
        for (std::size_t i = 0; i < config.num_devices; ++i) {
            signals[i] = learners[i].run_round(data[i].inputs, data[i].targets);
        }

        const bool synced = sync_enabled && (t % config.sync_period == 0);
        if (synced) {
            std::vector<double> merged;
            if (!config.topk_rate) {
                std::vector<std::vector<double>> thetas;
                thetas.reserve(config.num_devices);
                for (const Learner& learner : learners) {
                    thetas.push_back(learner.params().theta);
                }
                merged = fed_average(thetas, config.dataset_sizes);
                for (std::size_t i = 0; i < config.num_devices; ++i) {
                    comm.uploaded_values += dim;
                    uploaded_per_device[i] += dim;
                }
            } else {
                std::vector<SparseUpdate> updates;
                updates.reserve(config.num_devices);
                for (const Learner& learner : learners) {
                    updates.push_back(make_sparse_update(*net, learner.params(),
                                                         last_global, topk));
                }
                merged = sparse_merge(*net, updates, config.dataset_sizes);
                for (std::size_t i = 0; i < config.num_devices; ++i) {
                    const std::uint64_t sent =
                        updates[i].value_count() + updates[i].index_count();
                    comm.uploaded_values += updates[i].value_count();
                    comm.uploaded_indices += updates[i].index_count();
                    uploaded_per_device[i] += sent;
                }
            }
            comm.broadcast_values += static_cast<std::uint64_t>(config.num_devices) * dim;
            for (Learner& learner : learners) {
                learner.params().theta = merged;
            }
            last_global = std::move(merged);
        }
        last_round_synced = synced;

        result.history.push_back(RoundRecord{t, synced, signals, uploaded_per_device});
        if (hook) {
            hook(t, learners, comm);
        }
    }

    for (const Learner& learner : learners) {
        result.device_params.push_back(learner.params());
    }
    std::vector<std::vector<double>> finals;
    finals.reserve(config.num_devices);
    for (const Learner& learner : learners) {
        finals.push_back(learner.params().theta);
    }
    result.dense_average = ModelParams{net->layout,
                                       fed_average(finals, config.dataset_sizes)};
    if (last_round_synced) {
        result.synced_global = ModelParams{net->layout, last_global};
    }
    result.comm = comm;
    return result;
}

void run_standalone_training(std::shared_ptr<const Network> net, const Hyperparams& hyper,
                             const ModelParams& initial, const DeviceData& data,
                             std::uint64_t seed, std::size_t rounds,
                             const std::function<void(std::size_t, const Learner&)>& hook) {
    Learner learner(std::move(net), hyper, initial, seed);
    for (std::size_t t = 1; t <= rounds; ++t) {
        learner.run_round(data.inputs, data.targets);
        if (hook) {
            hook(t, learner);
        }
    }
}

} // namespace fedsnn
