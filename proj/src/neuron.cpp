#include "fedsnn/neuron.hpp"

namespace fedsnn {

double membrane_potential(const Network& net, std::size_t n, const ModelParams& params,
                          const TraceState& traces) {
    const ParamLayout& layout = *params.layout;
    const std::size_t num_basis = net.basis.num_basis;
    const auto& sources = net.topology.presynaptic[n];

    double u = params.theta[layout.bias_index(n)] +
               params.theta[layout.feedback_index(n)] * traces.feedback(n);
    std::size_t idx = layout.synapse_index(n, 0, 0);
    for (std::size_t j = 0; j < sources.size(); ++j) {
        const std::size_t k = sources[j];
        for (std::size_t l = 0; l < num_basis; ++l) {
            u += params.theta[idx++] * traces.synaptic(k, l);
        }
    }
    return u;
}

} // namespace fedsnn
