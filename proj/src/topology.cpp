#include "fedsnn/topology.hpp"

#include <set>
#include <string>

#include "fedsnn/errors.hpp"

namespace fedsnn {

NetworkTopology NetworkTopology::fully_connected(std::size_t n_input, std::size_t n_hidden,
                                                 std::size_t n_output) {
    NetworkTopology topo;
    topo.num_input = n_input;
    topo.num_hidden = n_hidden;
    topo.num_output = n_output;
    topo.presynaptic.resize(topo.num_neurons());
    for (std::size_t n = n_input; n < topo.num_neurons(); ++n) {
        auto& sources = topo.presynaptic[n];
        sources.reserve(topo.num_neurons() - 1);
        for (std::size_t k = 0; k < n_input; ++k) {
            sources.push_back(static_cast<std::uint32_t>(k));
        }
        for (std::size_t k = n_input; k < topo.num_neurons(); ++k) {
            if (k != n) {
                sources.push_back(static_cast<std::uint32_t>(k));
            }
        }
    }
    return topo;
}

void NetworkTopology::validate() const {
    if (num_output == 0) {
        throw ConfigError("topology: at least one output neuron required");
    }
    if (presynaptic.size() != num_neurons()) {
        throw ConfigError("topology: presynaptic list count " +
                          std::to_string(presynaptic.size()) + " != neuron count " +
                          std::to_string(num_neurons()));
    }
    for (std::size_t n = 0; n < num_neurons(); ++n) {
        if (is_input(n) && !presynaptic[n].empty()) {
            throw ConfigError("topology: input neuron " + std::to_string(n) +
                              " must have an empty presynaptic set");
        }
        std::set<std::uint32_t> seen;
        for (std::uint32_t k : presynaptic[n]) {
            if (k >= num_neurons()) {
                throw ConfigError("topology: synapse source " + std::to_string(k) +
                                  " out of range");
            }
            if (!seen.insert(k).second) {
                throw ConfigError("topology: duplicate synapse source " + std::to_string(k) +
                                  " for neuron " + std::to_string(n));
            }
        }
    }
}

} // namespace fedsnn
