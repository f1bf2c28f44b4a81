#include "fedsnn/data.hpp"

#include <string>

#include "fedsnn/errors.hpp"

namespace fedsnn {

SpikeRecord rate_encode(const std::vector<double>& covariates, std::size_t num_steps,
                        double p_max, RngStream& rng) {
    if (p_max < 0.0 || p_max > 1.0) {
        throw ConfigError("rate_encode: p_max must be in [0, 1]");
    }
    SpikeRecord raster(covariates.size(), num_steps);
    for (std::size_t n = 0; n < covariates.size(); ++n) {
        const double x = covariates[n];
        if (x < 0.0 || x > 1.0) {
            throw ConfigError("rate_encode: covariate " + std::to_string(n) +
                              " = " + std::to_string(x) + " outside [0, 1]");
        }
        const double p = x * p_max;
        for (std::size_t s = 1; s <= num_steps; ++s) {
            raster.set(n, s, rng.bernoulli(p));
        }
    }
    return raster;
}

SpikeRecord encode_target(std::size_t label, std::size_t num_outputs, std::size_t num_steps,
                          TargetScheme scheme, std::size_t period) {
    if (label >= num_outputs) {
        throw ConfigError("encode_target: class " + std::to_string(label) +
                          " >= output count " + std::to_string(num_outputs));
    }
    if (scheme == TargetScheme::periodic && period < 1) {
        throw ConfigError("encode_target: period must be >= 1");
    }
    SpikeRecord raster(num_outputs, num_steps);
    for (std::size_t s = 1; s <= num_steps; ++s) {
        const bool on = scheme == TargetScheme::constant_one || (s % period == 0);
        raster.set(label, s, on);
    }
    return raster;
}

StreamPair concatenate_stream(const std::vector<EncodedExample>& examples, std::size_t gap) {
    if (examples.empty()) {
        throw ConfigError("concatenate_stream: no examples");
    }
    const std::size_t num_input = examples.front().inputs.num_neurons();
    const std::size_t num_output = examples.front().targets.num_neurons();
    const std::size_t s_prime = examples.front().inputs.num_steps();
    const std::size_t span = s_prime + gap;

    StreamPair stream{SpikeRecord(num_input, examples.size() * span),
                      SpikeRecord(num_output, examples.size() * span)};
    std::size_t base = 0;
    for (const EncodedExample& example : examples) {
        if (example.inputs.num_neurons() != num_input ||
            example.targets.num_neurons() != num_output ||
            example.inputs.num_steps() != s_prime ||
            example.targets.num_steps() != s_prime) {
            throw DimensionError("concatenate_stream: inconsistent raster shapes");
        }
        for (std::size_t s = 1; s <= s_prime; ++s) {
            for (std::size_t n = 0; n < num_input; ++n) {
                stream.inputs.set(n, base + s, example.inputs.at(n, s));
            }
            for (std::size_t n = 0; n < num_output; ++n) {
                stream.targets.set(n, base + s, example.targets.at(n, s));
            }
        }
        base += span; // gap steps stay zero
    }
    return stream;
}

std::vector<std::vector<double>> make_block_templates(std::size_t num_classes,
                                                      std::size_t num_input, double high,
                                                      double low) {
    if (num_classes == 0 || num_input < num_classes) {
        throw ConfigError("templates: need at least one input row per class");
    }
    const std::size_t block = num_input / num_classes;
    std::vector<std::vector<double>> templates(num_classes,
                                               std::vector<double>(num_input, low));
    for (std::size_t c = 0; c < num_classes; ++c) {
        const std::size_t begin = c * block;
        const std::size_t end = (c + 1 == num_classes) ? num_input : begin + block;
        for (std::size_t n = begin; n < end; ++n) {
            templates[c][n] = high;
        }
    }
    return templates;
}

namespace {

Example make_noisy_example(const std::vector<double>& rates, std::size_t s_prime,
                           double noise, std::uint16_t label, RngStream& rng) {
    SpikeRecord raster = rate_encode(rates, s_prime, 1.0, rng);
    if (noise > 0.0) {
        for (std::size_t n = 0; n < raster.num_neurons(); ++n) {
            for (std::size_t s = 1; s <= s_prime; ++s) {
                if (rng.bernoulli(noise)) {
                    raster.set(n, s, !raster.at(n, s));
                }
            }
        }
    }
    Example example;
    example.raster = std::move(raster);
    example.label = label;
    return example;
}

} // namespace

SyntheticData make_synthetic_noniid(const SyntheticSpec& spec, std::uint64_t seed) {
    if (spec.templates.size() != spec.num_classes) {
        throw ConfigError("synthetic: " + std::to_string(spec.templates.size()) +
                          " templates for " + std::to_string(spec.num_classes) + " classes");
    }
    if (spec.train_counts.size() != spec.num_classes) {
        throw ConfigError("synthetic: one train count per device/class required");
    }
    if (spec.noise < 0.0 || spec.noise > 1.0) {
        throw ConfigError("synthetic: noise must be in [0, 1]");
    }
    if (spec.test_per_class == 0) {
        throw ConfigError("synthetic: test_per_class must be >= 1");
    }
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
        if (spec.templates[c].size() != spec.num_input) {
            throw ConfigError("synthetic: template " + std::to_string(c) +
                              " length != num_input");
        }
        if (spec.train_counts[c] == 0) {
            throw ConfigError("synthetic: device " + std::to_string(c) +
                              " would receive an empty train set");
        }
    }

    RngStream rng(seed);
    SyntheticData data;
    data.device_train.resize(spec.num_classes);
    for (std::size_t c = 0; c < spec.num_classes; ++c) {
        data.device_train[c].reserve(spec.train_counts[c]);
        for (std::size_t j = 0; j < spec.train_counts[c]; ++j) {
            data.device_train[c].push_back(make_noisy_example(
                spec.templates[c], spec.s_prime, spec.noise,
                static_cast<std::uint16_t>(c), rng));
        }
    }
    for (std::size_t j = 0; j < spec.test_per_class; ++j) {
        for (std::size_t c = 0; c < spec.num_classes; ++c) {
            data.test.push_back(make_noisy_example(spec.templates[c], spec.s_prime,
                                                   spec.noise,
                                                   static_cast<std::uint16_t>(c), rng));
        }
    }
    return data;
}

} // namespace fedsnn
