#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedsnn/basis.hpp"
#include "fedsnn/topology.hpp"

namespace fedsnn {

// Filtered spike history of one simulated network: per-neuron ring buffers of
// the last window_len spike bits, the per-(source, kernel) synaptic traces and
// the per-neuron feedback traces at the most recent step.
//
// The synaptic trace of synapse (n, k) under kernel l equals the convolution
// of kernel l with source k's spike train, so one trace per (k, l) serves
// every synapse that reads from k.
class TraceState {
public:
    TraceState() = default;
    TraceState(const NetworkTopology& topology, const BasisSet& basis);

    // Advance one step: push this step's spike bits (one per neuron) and
    // refresh all traces from the ring buffers. Throws DimensionError on a
    // spike vector length mismatch.
    void update(const BasisSet& basis, std::span<const std::uint8_t> spikes);

    // Convolution of kernel l with source neuron k's train, at the last
    // pushed step. Zero before any update.
    double synaptic(std::size_t source, std::size_t l) const {
        return synaptic_[source * num_basis_ + l];
    }
    double feedback(std::size_t neuron) const { return feedback_[neuron]; }

    // Number of steps pushed so far.
    std::size_t current_step() const { return step_; }

    // Spike bit of `neuron` at `age` steps before the current step (age 0 =
    // current). Only the last window_len steps are retained.
    bool history_bit(std::size_t neuron, std::size_t age) const;

private:
    std::size_t num_neurons_ = 0;
    std::size_t num_basis_ = 0;
    std::size_t window_len_ = 0;
    std::size_t head_ = 0; // ring slot of the current step
    std::size_t step_ = 0;
    std::vector<std::uint8_t> history_; // num_neurons x window_len ring
    std::vector<double> synaptic_;      // num_neurons x num_basis
    std::vector<double> feedback_;      // num_neurons
};

} // namespace fedsnn
