#pragma once

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fedsnn {

// Dense binary raster: one bit per (neuron, step). Steps are 1-based like the
// algorithmic time index; neuron ids are 0-based.
class SpikeRecord {
public:
    SpikeRecord() = default;
    SpikeRecord(std::size_t num_neurons, std::size_t num_steps)
        : num_neurons_(num_neurons), num_steps_(num_steps),
          bits_(num_neurons * num_steps, 0) {}

    std::size_t num_neurons() const { return num_neurons_; }
    std::size_t num_steps() const { return num_steps_; }

    bool at(std::size_t neuron, std::size_t step) const {
        assert(neuron < num_neurons_ && step >= 1 && step <= num_steps_);
        return bits_[neuron * num_steps_ + (step - 1)] != 0;
    }

    void set(std::size_t neuron, std::size_t step, bool value) {
        assert(neuron < num_neurons_ && step >= 1 && step <= num_steps_);
        bits_[neuron * num_steps_ + (step - 1)] = value ? 1 : 0;
    }

    bool operator==(const SpikeRecord& other) const {
        return num_neurons_ == other.num_neurons_ && num_steps_ == other.num_steps_ &&
               bits_ == other.bits_;
    }

private:
    std::size_t num_neurons_ = 0;
    std::size_t num_steps_ = 0;
    std::vector<std::uint8_t> bits_;
};

} // namespace fedsnn
