#include "fedsnn/learner.hpp"

#include <string>

#include "fedsnn/errors.hpp"
#include "fedsnn/neuron.hpp"

namespace fedsnn {

void accumulate_gradient_log_prob(const Network& net, std::size_t n, bool o, double u,
                                  const TraceState& traces, std::span<double> block) {
    const double err = (o ? 1.0 : 0.0) - spike_probability(u);
    const std::size_t num_basis = net.basis.num_basis;
    const auto& sources = net.topology.presynaptic[n];

    block[0] += err;                          // bias
    block[1] += err * traces.feedback(n);     // feedback weight
    std::size_t idx = 2;
    for (std::size_t j = 0; j < sources.size(); ++j) {
        const std::size_t k = sources[j];
        for (std::size_t l = 0; l < num_basis; ++l) {
            block[idx++] += err * traces.synaptic(k, l);
        }
    }
}

std::vector<double> gradient_log_prob(const Network& net, std::size_t n, bool o, double u,
                                      const TraceState& traces) {
    std::vector<double> block(net.layout->block_size(n), 0.0);
    accumulate_gradient_log_prob(net, n, o, u, traces, block);
    return block;
}

WindowResult step_window(const Network& net, const ModelParams& params, LearnerState& state,
                         const SpikeRecord& inputs, const SpikeRecord& targets,
                         std::size_t window_len) {
    const NetworkTopology& topo = net.topology;
    const std::size_t num_neurons = topo.num_neurons();
    if (inputs.num_neurons() != topo.num_input) {
        throw DimensionError("step_window: input raster has " +
                             std::to_string(inputs.num_neurons()) + " rows, expected " +
                             std::to_string(topo.num_input));
    }
    if (targets.num_neurons() != topo.num_output) {
        throw DimensionError("step_window: target raster has " +
                             std::to_string(targets.num_neurons()) + " rows, expected " +
                             std::to_string(topo.num_output));
    }
    if (state.local_step + window_len > inputs.num_steps() ||
        inputs.num_steps() != targets.num_steps()) {
        throw DimensionError("step_window: streams do not cover steps " +
                             std::to_string(state.local_step + 1) + ".." +
                             std::to_string(state.local_step + window_len));
    }

    WindowResult result;
    result.gradient_sum.assign(net.layout->total_size(), 0.0);

    std::vector<double> potentials(num_neurons);
    std::vector<std::uint8_t> spikes(num_neurons);

    for (std::size_t w = 0; w < window_len; ++w) {
        const std::size_t s = state.local_step + 1;

        // Potentials for every neuron from traces of steps <= s-1.
        for (std::size_t n = 0; n < num_neurons; ++n) {
            potentials[n] = membrane_potential(net, n, params, state.traces);
        }

        // Visible neurons are clamped to data; hidden neurons sample, in id
        // order, one stream draw each.
        for (std::size_t n = 0; n < num_neurons; ++n) {
            if (topo.is_input(n)) {
                spikes[n] = inputs.at(n, s) ? 1 : 0;
            } else if (topo.is_hidden(n)) {
                spikes[n] = sample_spike(potentials[n], state.rng) ? 1 : 0;
            } else {
                spikes[n] = targets.at(n - topo.first_output(), s) ? 1 : 0;
            }
        }

        for (std::size_t n = 0; n < num_neurons; ++n) {
            const bool o = spikes[n] != 0;
            std::span<double> block{result.gradient_sum.data() + net.layout->block_offset(n),
                                    net.layout->block_size(n)};
            accumulate_gradient_log_prob(net, n, o, potentials[n], state.traces, block);
            if (topo.is_visible(n)) {
                result.visible_log_prob += log_spike_probability(o, potentials[n]);
            }
        }

        state.traces.update(net.basis, spikes);
        ++state.local_step;
    }
    return result;
}

void update_eligibility(std::span<double> eligibility, std::span<const double> window_sum,
                        double kappa) {
    if (eligibility.size() != window_sum.size()) {
        throw DimensionError("eligibility: size " + std::to_string(eligibility.size()) +
                             " != window gradient size " + std::to_string(window_sum.size()));
    }
    for (std::size_t i = 0; i < eligibility.size(); ++i) {
        eligibility[i] = kappa * eligibility[i] + (1.0 - kappa) * window_sum[i];
    }
}

void apply_local_update(const Network& net, ModelParams& params,
                        std::span<const double> eligibility, double learning_signal,
                        double alpha) {
    const ParamLayout& layout = *params.layout;
    for (std::size_t n = 0; n < net.topology.num_neurons(); ++n) {
        const double gate = net.topology.is_hidden(n) ? learning_signal : 1.0;
        const std::size_t begin = layout.block_offset(n);
        const std::size_t end = begin + layout.block_size(n);
        for (std::size_t i = begin; i < end; ++i) {
            params.theta[i] += alpha * gate * eligibility[i];
        }
    }
}

double Learner::run_round(const SpikeRecord& inputs, const SpikeRecord& targets) {
    WindowResult window = step_window(*net_, params_, state_, inputs, targets,
                                      hyper_.window_len);
    state_.learning_signal = update_learning_signal(state_.learning_signal,
                                                    window.visible_log_prob,
                                                    hyper_.trace_decay);
    update_eligibility(state_.eligibility, window.gradient_sum, hyper_.trace_decay);
    apply_local_update(*net_, params_, state_.eligibility, state_.learning_signal,
                       hyper_.learning_rate);
    ++state_.global_round;
    return state_.learning_signal;
}

double evaluate_log_loss(const Network& net, const ModelParams& params,
                         const SpikeRecord& inputs, const SpikeRecord& targets,
                         std::size_t num_samples, RngStream& rng) {
    const NetworkTopology& topo = net.topology;
    if (inputs.num_neurons() != topo.num_input ||
        targets.num_neurons() != topo.num_output ||
        inputs.num_steps() != targets.num_steps()) {
        throw DimensionError("evaluate_log_loss: raster shape mismatch");
    }
    const std::size_t steps = inputs.num_steps();
    const std::size_t num_neurons = topo.num_neurons();
    const std::size_t runs = topo.num_hidden == 0 ? 1 : num_samples;

    double total = 0.0;
    std::vector<std::uint8_t> spikes(num_neurons);
    for (std::size_t m = 0; m < runs; ++m) {
        TraceState traces(topo, net.basis);
        double run_log_prob = 0.0;
        for (std::size_t s = 1; s <= steps; ++s) {
            for (std::size_t n = 0; n < num_neurons; ++n) {
                if (topo.is_input(n)) {
                    spikes[n] = inputs.at(n, s) ? 1 : 0;
                    continue;
                }
                const double u = membrane_potential(net, n, params, traces);
                if (topo.is_hidden(n)) {
                    spikes[n] = sample_spike(u, rng) ? 1 : 0;
                } else {
                    const bool o = targets.at(n - topo.first_output(), s);
                    spikes[n] = o ? 1 : 0;
                    run_log_prob += log_spike_probability(o, u);
                }
            }
            traces.update(net.basis, spikes);
        }
        total += -run_log_prob;
    }
    return total / static_cast<double>(runs);
}

} // namespace fedsnn
