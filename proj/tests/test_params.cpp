#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "fedsnn/errors.hpp"
#include "fedsnn/network.hpp"
#include "fedsnn/params.hpp"

using namespace fedsnn;

TEST_CASE("layout dimension matches the per-neuron block formula") {
    const NetworkTopology topo = NetworkTopology::fully_connected(4, 3, 2);
    const std::size_t k = 5;
    const ParamLayout layout(topo, k);

    std::size_t expected = 2 * topo.num_input; // bias + feedback per input neuron
    for (std::size_t n = topo.num_input; n < topo.num_neurons(); ++n) {
        expected += 2 + k * topo.presynaptic[n].size();
    }
    CHECK(layout.total_size() == expected);

    // non-input neurons see all inputs plus the other non-inputs
    CHECK(layout.num_presynaptic(topo.num_input) == topo.num_neurons() - 1 - topo.num_input +
                                                        topo.num_input);
    CHECK(layout.num_presynaptic(0) == 0);
}

TEST_CASE("flat layout order is neuron-major: bias, feedback, synapses by source then kernel") {
    const auto net = std::make_shared<const Network>(NetworkTopology::fully_connected(2, 1, 1),
                                                     make_raised_cosine_basis(2, 4));
    const ParamLayout& layout = *net->layout;

    // inputs: 2 entries each
    CHECK(layout.bias_index(0) == 0);
    CHECK(layout.feedback_index(0) == 1);
    CHECK(layout.bias_index(1) == 2);
    CHECK(layout.feedback_index(1) == 3);

    // hidden neuron 2: bias, feedback, then 3 sources x 2 kernels
    CHECK(layout.bias_index(2) == 4);
    CHECK(layout.feedback_index(2) == 5);
    CHECK(layout.synapse_index(2, 0, 0) == 6);
    CHECK(layout.synapse_index(2, 0, 1) == 7);
    CHECK(layout.synapse_index(2, 1, 0) == 8);
    CHECK(layout.synapse_index(2, 2, 1) == 11);

    // output neuron 3 follows immediately
    CHECK(layout.bias_index(3) == 12);
    CHECK(layout.block_size(3) == 2 + 2 * 3);
    CHECK(layout.total_size() == 20);
}

TEST_CASE("flatten/unflatten round-trips exactly") {
    const auto net = std::make_shared<const Network>(NetworkTopology::fully_connected(3, 2, 2),
                                                     make_raised_cosine_basis(3, 7));
    RngStream rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        ModelParams params = make_initial_params(net->layout, 2.0, rng);
        const std::vector<double> flat = params.flatten();
        const ModelParams back = ModelParams::unflatten(net->layout, flat);
        CHECK(back.theta == params.theta);

        // structured accessors address the same storage
        const std::size_t n = net->topology.num_input; // first hidden
        CHECK(back.bias(n) == flat[net->layout->bias_index(n)]);
        CHECK(back.synapse_weight(n, 1, 2) == flat[net->layout->synapse_index(n, 1, 2)]);
    }
}

TEST_CASE("unflatten rejects a wrong-size vector") {
    const auto net = std::make_shared<const Network>(NetworkTopology::fully_connected(2, 0, 1),
                                                     make_raised_cosine_basis(2, 4));
    std::vector<double> wrong(net->layout->total_size() + 1, 0.0);
    CHECK_THROWS_AS(ModelParams::unflatten(net->layout, wrong), DimensionError);
}

TEST_CASE("initial parameters are bounded and deterministic in the seed") {
    const auto net = std::make_shared<const Network>(NetworkTopology::fully_connected(4, 2, 2),
                                                     make_raised_cosine_basis(4, 8));
    RngStream a(123), b(123);
    const ModelParams pa = make_initial_params(net->layout, 0.05, a);
    const ModelParams pb = make_initial_params(net->layout, 0.05, b);
    CHECK(pa.theta == pb.theta);
    for (double v : pa.theta) {
        CHECK(v >= -0.05);
        CHECK(v < 0.05);
    }
}
