#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fedsnn {

// Directed synapse graph over input/hidden/output neurons.
// Neuron ids are contiguous: [0, num_input) inputs, then hidden, then outputs.
// Input neurons never receive synapses; their presynaptic sets are empty.
struct NetworkTopology {
    std::size_t num_input = 0;
    std::size_t num_hidden = 0;
    std::size_t num_output = 0;

    // One ordered source list per neuron id. Entry order fixes the parameter
    // layout of the owning neuron's synaptic weights.
    std::vector<std::vector<std::uint32_t>> presynaptic;

    std::size_t num_neurons() const { return num_input + num_hidden + num_output; }
    bool is_input(std::size_t n) const { return n < num_input; }
    bool is_hidden(std::size_t n) const { return n >= num_input && n < num_input + num_hidden; }
    bool is_output(std::size_t n) const { return n >= num_input + num_hidden && n < num_neurons(); }
    bool is_visible(std::size_t n) const { return !is_hidden(n); }
    std::size_t first_output() const { return num_input + num_hidden; }

    // Standard layout: synapses from every input neuron to every non-input
    // neuron, hidden and output neurons fully connected among themselves
    // (no self-synapses; self-memory is the feedback trace).
    static NetworkTopology fully_connected(std::size_t n_input, std::size_t n_hidden,
                                           std::size_t n_output);

    // Throws ConfigError if the partition or the synapse lists are inconsistent.
    void validate() const;
};

} // namespace fedsnn
