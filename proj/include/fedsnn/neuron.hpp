#pragma once

#include <cmath>
#include <cstddef>

#include "fedsnn/network.hpp"
#include "fedsnn/rng.hpp"
#include "fedsnn/traces.hpp"

namespace fedsnn {

// Sigmoid spiking probability. Branching on the sign keeps exp() from
// overflowing for any finite input.
inline double spike_probability(double u) {
    if (u >= 0.0) {
        return 1.0 / (1.0 + std::exp(-u));
    }
    const double e = std::exp(u);
    return e / (1.0 + e);
}

// log(sigmoid(u)) without ever evaluating log of a hard zero.
inline double log_sigmoid(double u) {
    if (u >= 0.0) {
        return -std::log1p(std::exp(-u));
    }
    return u - std::log1p(std::exp(u));
}

// log p(o | u) for a Bernoulli(sigmoid(u)) spike bit.
inline double log_spike_probability(bool o, double u) {
    return o ? log_sigmoid(u) : log_sigmoid(-u);
}

// One Bernoulli draw against sigmoid(u); consumes exactly one stream sample.
inline bool sample_spike(double u, RngStream& rng) {
    return rng.next_double() < spike_probability(u);
}

// Membrane potential of neuron n at step s from traces reflecting history up
// to s-1: weighted synaptic traces of its sources, its own weighted feedback
// trace, plus the bias.
double membrane_potential(const Network& net, std::size_t n, const ModelParams& params,
                          const TraceState& traces);

} // namespace fedsnn
