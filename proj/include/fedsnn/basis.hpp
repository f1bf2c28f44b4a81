#pragma once

#include <cstddef>
#include <vector>

namespace fedsnn {

// Fixed temporal kernels shared by all synapses, sampled on the discrete
// step grid s = 1..window_len, plus the fixed feedback (self-memory) kernel.
struct BasisSet {
    std::size_t num_basis = 0;  // kernels per synapse
    std::size_t window_len = 0; // kernel support in time-steps

    std::vector<double> basis;    // num_basis x window_len, row-major
    std::vector<double> feedback; // window_len

    // s is 1-based, matching the algorithmic time index.
    double basis_value(std::size_t l, std::size_t s) const {
        return basis[l * window_len + (s - 1)];
    }
    double feedback_value(std::size_t s) const { return feedback[s - 1]; }
};

// Cosine bumps 0.5*(1 + cos(pi*(s - c_l)/width)) clipped to |s - c_l| <= width,
// centers evenly spaced over [1, window_len] and snapped to the sample grid so
// each kernel reaches exactly 1.0 at its center sample; width is twice the
// center spacing. The feedback kernel is exp(-(s-1)/tau) with
// tau = window_len/2. Throws ConfigError on invalid counts.
BasisSet make_raised_cosine_basis(std::size_t num_basis, std::size_t window_len);

} // namespace fedsnn
