#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "fedsnn/errors.hpp"
#include "fedsnn/rng.hpp"
#include "fedsnn/topology.hpp"
#include "fedsnn/traces.hpp"

using namespace fedsnn;

namespace {

// Direct finite convolution over the full spike history, truncated to the
// kernel window: (kernel * train)(s) = sum_m kernel(m) * train(s - m + 1).
double convolve_at(const std::vector<double>& kernel, const std::vector<std::uint8_t>& train,
                   std::size_t s) {
    double acc = 0.0;
    for (std::size_t m = 1; m <= kernel.size() && m <= s; ++m) {
        if (train[s - m] != 0) {
            acc += kernel[m - 1];
        }
    }
    return acc;
}

BasisSet random_basis(std::size_t num_basis, std::size_t window, RngStream& rng) {
    BasisSet set;
    set.num_basis = num_basis;
    set.window_len = window;
    set.basis.resize(num_basis * window);
    set.feedback.resize(window);
    for (double& v : set.basis) {
        v = rng.next_double();
    }
    for (double& v : set.feedback) {
        v = rng.next_double();
    }
    return set;
}

} // namespace

TEST_CASE("zero history keeps every trace at zero") {
    const NetworkTopology topo = NetworkTopology::fully_connected(2, 0, 1);
    const BasisSet basis = make_raised_cosine_basis(3, 6);
    TraceState traces(topo, basis);
    const std::vector<std::uint8_t> silent(topo.num_neurons(), 0);
    for (int step = 0; step < 10; ++step) {
        traces.update(basis, silent);
        for (std::size_t n = 0; n < topo.num_neurons(); ++n) {
            CHECK(traces.feedback(n) == 0.0);
            for (std::size_t l = 0; l < basis.num_basis; ++l) {
                CHECK(traces.synaptic(n, l) == 0.0);
            }
        }
    }
}

TEST_CASE("a single spike reproduces the kernel at increasing offsets") {
    const NetworkTopology topo = NetworkTopology::fully_connected(1, 0, 1);
    const BasisSet basis = make_raised_cosine_basis(2, 5);
    TraceState traces(topo, basis);

    std::vector<std::uint8_t> spikes{1, 0};
    traces.update(basis, spikes); // spike at s0, offset d = 0
    for (std::size_t d = 0; d < basis.window_len; ++d) {
        for (std::size_t l = 0; l < basis.num_basis; ++l) {
            CHECK(traces.synaptic(0, l) == doctest::Approx(basis.basis_value(l, d + 1)));
        }
        CHECK(traces.feedback(0) == doctest::Approx(basis.feedback_value(d + 1)));
        spikes[0] = 0;
        traces.update(basis, spikes);
    }
    // beyond the window the spike has left the ring
    CHECK(traces.synaptic(0, 0) == 0.0);
    CHECK(traces.feedback(0) == 0.0);
}

TEST_CASE("two spikes superpose as shifted kernels") {
    const NetworkTopology topo = NetworkTopology::fully_connected(1, 0, 1);
    const BasisSet basis = make_raised_cosine_basis(2, 6);
    TraceState traces(topo, basis);

    traces.update(basis, std::vector<std::uint8_t>{1, 0}); // s0
    traces.update(basis, std::vector<std::uint8_t>{1, 0}); // s0 + 1
    for (std::size_t l = 0; l < basis.num_basis; ++l) {
        CHECK(traces.synaptic(0, l) ==
              doctest::Approx(basis.basis_value(l, 1) + basis.basis_value(l, 2)));
    }
}

TEST_CASE("ring-buffer traces equal direct convolution on random trains") {
    RngStream rng(2024);
    const NetworkTopology topo = NetworkTopology::fully_connected(2, 1, 1);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t window = 2 + rng.uniform_index(12);
        const std::size_t num_basis = 1 + rng.uniform_index(std::min<std::size_t>(window, 6));
        const BasisSet basis = random_basis(num_basis, window, rng);
        const std::size_t steps = 1 + rng.uniform_index(200);
        const double rate = rng.next_double();

        std::vector<std::vector<std::uint8_t>> trains(topo.num_neurons());
        TraceState traces(topo, basis);
        for (std::size_t s = 1; s <= steps; ++s) {
            std::vector<std::uint8_t> spikes(topo.num_neurons());
            for (std::size_t n = 0; n < topo.num_neurons(); ++n) {
                spikes[n] = rng.bernoulli(rate) ? 1 : 0;
                trains[n].push_back(spikes[n]);
            }
            traces.update(basis, spikes);

            for (std::size_t n = 0; n < topo.num_neurons(); ++n) {
                std::vector<double> kernel(basis.window_len);
                for (std::size_t l = 0; l < basis.num_basis; ++l) {
                    for (std::size_t m = 1; m <= basis.window_len; ++m) {
                        kernel[m - 1] = basis.basis_value(l, m);
                    }
                    const double expected = convolve_at(kernel, trains[n], s);
                    CHECK(std::abs(traces.synaptic(n, l) - expected) <= 1e-12);
                }
                for (std::size_t m = 1; m <= basis.window_len; ++m) {
                    kernel[m - 1] = basis.feedback_value(m);
                }
                CHECK(std::abs(traces.feedback(n) - convolve_at(kernel, trains[n], s)) <=
                      1e-12);
            }
        }
    }
}

TEST_CASE("spike vector length mismatch is rejected") {
    const NetworkTopology topo = NetworkTopology::fully_connected(2, 0, 1);
    const BasisSet basis = make_raised_cosine_basis(2, 5);
    TraceState traces(topo, basis);
    const std::vector<std::uint8_t> wrong(topo.num_neurons() + 1, 0);
    CHECK_THROWS_AS(traces.update(basis, wrong), DimensionError);
}
