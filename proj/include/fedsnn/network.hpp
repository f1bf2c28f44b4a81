#pragma once

#include <memory>
#include <utility>

#include "fedsnn/basis.hpp"
#include "fedsnn/params.hpp"
#include "fedsnn/topology.hpp"

namespace fedsnn {

// Immutable bundle shared by every device in a run: the synapse graph, the
// kernel bank and the parameter addressing derived from them.
struct Network {
    NetworkTopology topology;
    BasisSet basis;
    std::shared_ptr<const ParamLayout> layout;

    Network(NetworkTopology topo, BasisSet basis_set)
        : topology(std::move(topo)), basis(std::move(basis_set)) {
        topology.validate();
        layout = std::make_shared<const ParamLayout>(topology, basis.num_basis);
    }
};

} // namespace fedsnn
