#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "fedsnn/data.hpp"

namespace fedsnn {

// In-memory form of a spike raster file: fixed-shape labeled binary rasters.
struct RasterDataset {
    std::size_t num_neurons = 0;
    std::size_t num_steps = 0;
    std::size_t num_classes = 0;
    std::vector<Example> examples; // every example carries a raster

    bool operator==(const RasterDataset& other) const;
};

// Binary container: magic "SRAS", little-endian u16 version (currently 1),
// u32 num_neurons / num_steps / num_examples / num_classes, then per example
// a u16 label followed by ceil(num_neurons*num_steps/8) packed bytes,
// neuron-major, step-minor, MSB first. Loads reject bad magic or version,
// truncated or oversized payloads, and out-of-range labels.
RasterDataset load_raster_file(const std::filesystem::path& path);
void save_raster_file(const RasterDataset& dataset, const std::filesystem::path& path);

} // namespace fedsnn
