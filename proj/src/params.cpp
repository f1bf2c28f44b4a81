#include "fedsnn/params.hpp"

#include <string>
#include <utility>

#include "fedsnn/errors.hpp"

namespace fedsnn {

ParamLayout::ParamLayout(const NetworkTopology& topology, std::size_t num_basis)
    : num_basis_(num_basis) {
    const std::size_t count = topology.num_neurons();
    offsets_.resize(count);
    presyn_counts_.resize(count);
    std::size_t offset = 0;
    for (std::size_t n = 0; n < count; ++n) {
        offsets_[n] = offset;
        presyn_counts_[n] = topology.presynaptic[n].size();
        offset += 2 + num_basis_ * presyn_counts_[n];
    }
    total_ = offset;
}

ModelParams ModelParams::unflatten(std::shared_ptr<const ParamLayout> layout,
                                   std::vector<double> values) {
    if (values.size() != layout->total_size()) {
        throw DimensionError("params: flat vector has " + std::to_string(values.size()) +
                             " entries, layout expects " +
                             std::to_string(layout->total_size()));
    }
    return ModelParams{std::move(layout), std::move(values)};
}

ModelParams make_zero_params(std::shared_ptr<const ParamLayout> layout) {
    std::vector<double> theta(layout->total_size(), 0.0);
    return ModelParams{std::move(layout), std::move(theta)};
}

ModelParams make_initial_params(std::shared_ptr<const ParamLayout> layout, double range,
                                RngStream& rng) {
    std::vector<double> theta(layout->total_size());
    for (double& v : theta) {
        v = (rng.next_double() * 2.0 - 1.0) * range;
    }
    return ModelParams{std::move(layout), std::move(theta)};
}

} // namespace fedsnn
