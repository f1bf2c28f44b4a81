#pragma once

#include <stdexcept>
#include <string>

namespace fedsnn {

// Invalid run/network configuration (bad counts, inconsistent sizes, bad keys).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched vector/raster dimensions between otherwise valid objects.
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File format or I/O failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fedsnn
