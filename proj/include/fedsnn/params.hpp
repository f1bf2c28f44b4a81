#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "fedsnn/rng.hpp"
#include "fedsnn/topology.hpp"

namespace fedsnn {

// Flat-vector addressing of all learnable parameters. Per neuron, in id
// order: bias, feedback weight, then one weight per (presynaptic source,
// kernel) with sources in presynaptic-list order and kernel index ascending.
// Input neurons carry only (bias, feedback); they have no synapses.
class ParamLayout {
public:
    ParamLayout(const NetworkTopology& topology, std::size_t num_basis);

    std::size_t total_size() const { return total_; }
    std::size_t num_neurons() const { return offsets_.size(); }
    std::size_t num_basis() const { return num_basis_; }

    std::size_t block_offset(std::size_t n) const { return offsets_[n]; }
    std::size_t block_size(std::size_t n) const {
        return 2 + num_basis_ * presyn_counts_[n];
    }
    std::size_t num_presynaptic(std::size_t n) const { return presyn_counts_[n]; }

    std::size_t bias_index(std::size_t n) const { return offsets_[n]; }
    std::size_t feedback_index(std::size_t n) const { return offsets_[n] + 1; }
    // j = position of the source in the neuron's presynaptic list.
    std::size_t synapse_index(std::size_t n, std::size_t j, std::size_t l) const {
        return offsets_[n] + 2 + j * num_basis_ + l;
    }

private:
    std::size_t num_basis_ = 0;
    std::size_t total_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> presyn_counts_;
};

// Model parameters as the flat vector theta plus its layout.
struct ModelParams {
    std::shared_ptr<const ParamLayout> layout;
    std::vector<double> theta;

    double bias(std::size_t n) const { return theta[layout->bias_index(n)]; }
    double& bias(std::size_t n) { return theta[layout->bias_index(n)]; }
    double feedback_weight(std::size_t n) const { return theta[layout->feedback_index(n)]; }
    double& feedback_weight(std::size_t n) { return theta[layout->feedback_index(n)]; }
    double synapse_weight(std::size_t n, std::size_t j, std::size_t l) const {
        return theta[layout->synapse_index(n, j, l)];
    }
    double& synapse_weight(std::size_t n, std::size_t j, std::size_t l) {
        return theta[layout->synapse_index(n, j, l)];
    }

    std::vector<double> flatten() const { return theta; }
    // Throws DimensionError if the vector does not match the layout size.
    static ModelParams unflatten(std::shared_ptr<const ParamLayout> layout,
                                 std::vector<double> values);
};

ModelParams make_zero_params(std::shared_ptr<const ParamLayout> layout);

// Uniform init in [-range, range); one draw per entry, flat-index order.
ModelParams make_initial_params(std::shared_ptr<const ParamLayout> layout, double range,
                                RngStream& rng);

} // namespace fedsnn
