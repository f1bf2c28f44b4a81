#include "fedsnn/traces.hpp"

#include <string>

#include "fedsnn/errors.hpp"

namespace fedsnn {

TraceState::TraceState(const NetworkTopology& topology, const BasisSet& basis)
    : num_neurons_(topology.num_neurons()),
      num_basis_(basis.num_basis),
      window_len_(basis.window_len),
      history_(num_neurons_ * window_len_, 0),
      synaptic_(num_neurons_ * num_basis_, 0.0),
      feedback_(num_neurons_, 0.0) {}

bool TraceState::history_bit(std::size_t neuron, std::size_t age) const {
    if (age >= step_ || age >= window_len_) {
        return false;
    }
    const std::size_t slot = (head_ + window_len_ - age) % window_len_;
    return history_[neuron * window_len_ + slot] != 0;
}

void TraceState::update(const BasisSet& basis, std::span<const std::uint8_t> spikes) {
    if (spikes.size() != num_neurons_) {
        throw DimensionError("traces: spike vector has " + std::to_string(spikes.size()) +
                             " entries, expected " + std::to_string(num_neurons_));
    }
    head_ = (head_ + 1) % window_len_;
    ++step_;
    for (std::size_t n = 0; n < num_neurons_; ++n) {
        history_[n * window_len_ + head_] = spikes[n] ? 1 : 0;
    }

    // Finite convolution over the retained window; age d pairs the bit at
    // step s-d with kernel sample d+1.
    const std::size_t depth = step_ < window_len_ ? step_ : window_len_;
    for (std::size_t n = 0; n < num_neurons_; ++n) {
        double fb = 0.0;
        for (std::size_t l = 0; l < num_basis_; ++l) {
            synaptic_[n * num_basis_ + l] = 0.0;
        }
        for (std::size_t d = 0; d < depth; ++d) {
            const std::size_t slot = (head_ + window_len_ - d) % window_len_;
            if (history_[n * window_len_ + slot] == 0) {
                continue;
            }
            for (std::size_t l = 0; l < num_basis_; ++l) {
                synaptic_[n * num_basis_ + l] += basis.basis_value(l, d + 1);
            }
            fb += basis.feedback_value(d + 1);
        }
        feedback_[n] = fb;
    }
}

} // namespace fedsnn
