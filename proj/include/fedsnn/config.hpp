#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fedsnn/data.hpp"

namespace fedsnn {

enum class DataSource { synthetic, raster };

// Fully validated experiment description, parsed from a flat key = value
// file ('#' starts a comment, unknown keys are rejected). Defaults are
// documented in the README; the local step budget D*(S'+gap) must equal
// rounds * delta_s.
struct RunConfig {
    // topology
    std::size_t n_input = 20;
    std::size_t n_hidden = 0;
    std::size_t n_output = 2;

    // basis
    std::size_t k_basis = 8;
    std::size_t basis_window = 10;

    // hyperparameters
    double alpha = 0.05;
    double kappa = 0.2;
    std::size_t delta_s = 5;

    // federation
    std::size_t devices = 2;
    std::size_t tau = 5;
    std::size_t rounds = 0; // 0 = derive from D*(S'+gap)/delta_s
    std::optional<double> sparse_rate;

    // data
    DataSource data = DataSource::synthetic;
    std::size_t d_examples = 50;
    std::size_t s_prime = 80;
    std::size_t gap = 0;
    TargetScheme target = TargetScheme::constant_one;
    std::size_t target_period = 2;
    // synthetic
    double noise = 0.02;
    double template_high = 1.0;
    double template_low = 0.0;
    std::size_t train_per_device = 100;
    std::size_t test_per_class = 50;
    // raster
    std::vector<std::string> raster_train; // one path per device
    std::string raster_test;
    double p_max = 1.0; // rate encoding cap for covariate examples

    // evaluation
    std::size_t eval_samples = 20;
    std::size_t eval_every = 0; // 0 = max(1, rounds/50)
    bool with_baseline = false;

    std::uint64_t seed = 0;
    std::string out = "out";

    std::size_t total_steps() const { return d_examples * (s_prime + gap); }
    std::size_t effective_rounds() const;
    std::size_t effective_eval_every() const;

    // Throws ConfigError on any inconsistency.
    void validate() const;
};

// Parse and validate; every error names the offending key or constraint.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

} // namespace fedsnn
