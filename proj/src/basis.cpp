#include "fedsnn/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fedsnn/errors.hpp"

namespace fedsnn {

BasisSet make_raised_cosine_basis(std::size_t num_basis, std::size_t window_len) {
    if (num_basis < 1) {
        throw ConfigError("basis: num_basis must be >= 1");
    }
    if (window_len < num_basis) {
        throw ConfigError("basis: window_len " + std::to_string(window_len) +
                          " must be >= num_basis " + std::to_string(num_basis));
    }

    BasisSet set;
    set.num_basis = num_basis;
    set.window_len = window_len;
    set.basis.assign(num_basis * window_len, 0.0);
    set.feedback.assign(window_len, 0.0);

    const double len = static_cast<double>(window_len);
    for (std::size_t l = 0; l < num_basis; ++l) {
        double center;
        double width;
        if (num_basis == 1) {
            center = std::round((1.0 + len) / 2.0);
            width = (len - 1.0) / 2.0;
        } else {
            const double spacing = (len - 1.0) / static_cast<double>(num_basis - 1);
            // Snapped to the grid so the center sample is exactly 1.0.
            center = std::round(1.0 + static_cast<double>(l) * spacing);
            width = 2.0 * spacing;
        }
        for (std::size_t s = 1; s <= window_len; ++s) {
            const double d = static_cast<double>(s) - center;
            if (width == 0.0) {
                set.basis[l * window_len + (s - 1)] = (d == 0.0) ? 1.0 : 0.0;
            } else if (std::abs(d) <= width) {
                set.basis[l * window_len + (s - 1)] =
                    0.5 * (1.0 + std::cos(std::numbers::pi * d / width));
            }
        }
    }

    const double tau = len / 2.0;
    for (std::size_t s = 1; s <= window_len; ++s) {
        set.feedback[s - 1] = std::exp(-(static_cast<double>(s) - 1.0) / tau);
    }
    return set;
}

} // namespace fedsnn
