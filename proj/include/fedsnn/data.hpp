#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "fedsnn/rng.hpp"
#include "fedsnn/spike_record.hpp"

namespace fedsnn {

// One labeled data point: either a real-valued covariate vector awaiting rate
// encoding, or an already-encoded input raster.
struct Example {
    std::vector<double> covariates;    // values in [0, 1]; empty when raster set
    std::optional<SpikeRecord> raster; // N_X x S'
    std::uint16_t label = 0;
};

enum class TargetScheme { constant_one, periodic };

// Independent Bernoulli(x_n * p_max) bit per (row, step); rows in id order,
// steps inner. Throws ConfigError on covariates outside [0, 1].
SpikeRecord rate_encode(const std::vector<double>& covariates, std::size_t num_steps,
                        double p_max, RngStream& rng);

// Label row spikes per scheme (every step, or steps where s mod period == 0);
// all other rows stay silent. Throws ConfigError on an invalid class.
SpikeRecord encode_target(std::size_t label, std::size_t num_outputs, std::size_t num_steps,
                          TargetScheme scheme, std::size_t period = 2);

struct EncodedExample {
    SpikeRecord inputs;  // N_X x S'
    SpikeRecord targets; // N_Y x S'
};

struct StreamPair {
    SpikeRecord inputs;
    SpikeRecord targets;
};

// Concatenate examples in order with `gap` all-zero steps after each one;
// the result spans D * (S' + gap) steps. Throws DimensionError on
// inconsistent raster shapes.
StreamPair concatenate_stream(const std::vector<EncodedExample>& examples, std::size_t gap);

// Synthetic non-IID task: per-class Bernoulli rate templates, device i
// trains only on class i.
struct SyntheticSpec {
    std::size_t num_classes = 2;
    std::size_t num_input = 20;
    std::size_t s_prime = 20;
    std::vector<std::vector<double>> templates; // one rate vector per class
    double noise = 0.0;                         // post-encoding bit-flip probability
    std::vector<std::size_t> train_counts;      // per device == per class
    std::size_t test_per_class = 20;
};

struct SyntheticData {
    std::vector<std::vector<Example>> device_train; // device i holds class i only
    std::vector<Example> test;                      // all classes, interleaved by class
};

// Rate-encodes the class template (then flips each bit with probability
// `noise`) for every requested example. Deterministic in the seed. Throws
// ConfigError on degenerate inputs (empty device train set, missing
// templates, out-of-range rates).
SyntheticData make_synthetic_noniid(const SyntheticSpec& spec, std::uint64_t seed);

// Disjoint block templates: class c rates `high` on its num_input/num_classes
// block of rows, `low` elsewhere.
std::vector<std::vector<double>> make_block_templates(std::size_t num_classes,
                                                      std::size_t num_input, double high,
                                                      double low);

} // namespace fedsnn
