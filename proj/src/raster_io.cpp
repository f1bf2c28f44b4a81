#include "fedsnn/raster_io.hpp"

#include <array>
#include <cstdint>
#include <fstream>
#include <string>

#include "fedsnn/errors.hpp"

namespace fedsnn {

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'R', 'A', 'S'};
constexpr std::uint16_t kVersion = 1;

void write_u16(std::ostream& out, std::uint16_t v) {
    const char bytes[2] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF)};
    out.write(bytes, 2);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    char bytes[4];
    for (int i = 0; i < 4; ++i) {
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    out.write(bytes, 4);
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char bytes[2];
    in.read(reinterpret_cast<char*>(bytes), 2);
    if (!in) {
        throw IoError("raster file: truncated header");
    }
    return static_cast<std::uint16_t>(bytes[0] | (bytes[1] << 8));
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char bytes[4];
    in.read(reinterpret_cast<char*>(bytes), 4);
    if (!in) {
        throw IoError("raster file: truncated header");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    }
    return v;
}

} // namespace

bool RasterDataset::operator==(const RasterDataset& other) const {
    if (num_neurons != other.num_neurons || num_steps != other.num_steps ||
        num_classes != other.num_classes || examples.size() != other.examples.size()) {
        return false;
    }
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (examples[i].label != other.examples[i].label ||
            examples[i].raster != other.examples[i].raster) {
            return false;
        }
    }
    return true;
}

void save_raster_file(const RasterDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("raster file: cannot open " + path.string() + " for writing");
    }
    out.write(kMagic.data(), kMagic.size());
    write_u16(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(dataset.num_neurons));
    write_u32(out, static_cast<std::uint32_t>(dataset.num_steps));
    write_u32(out, static_cast<std::uint32_t>(dataset.examples.size()));
    write_u32(out, static_cast<std::uint32_t>(dataset.num_classes));

    const std::size_t bits = dataset.num_neurons * dataset.num_steps;
    const std::size_t bytes = (bits + 7) / 8;
    std::vector<char> packed(bytes);
    for (const Example& example : dataset.examples) {
        if (!example.raster || example.raster->num_neurons() != dataset.num_neurons ||
            example.raster->num_steps() != dataset.num_steps) {
            throw IoError("raster file: example raster does not match the header shape");
        }
        write_u16(out, example.label);
        std::fill(packed.begin(), packed.end(), 0);
        std::size_t bit = 0;
        for (std::size_t n = 0; n < dataset.num_neurons; ++n) {
            for (std::size_t s = 1; s <= dataset.num_steps; ++s, ++bit) {
                if (example.raster->at(n, s)) {
                    packed[bit / 8] |= static_cast<char>(0x80u >> (bit % 8));
                }
            }
        }
        out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    }
    if (!out) {
        throw IoError("raster file: write failed for " + path.string());
    }
}

RasterDataset load_raster_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("raster file: cannot open " + path.string());
    }
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw IoError("raster file: bad magic in " + path.string());
    }
    const std::uint16_t version = read_u16(in);
    if (version != kVersion) {
        throw IoError("raster file: unsupported version " + std::to_string(version));
    }

    RasterDataset dataset;
    dataset.num_neurons = read_u32(in);
    dataset.num_steps = read_u32(in);
    const std::uint32_t num_examples = read_u32(in);
    dataset.num_classes = read_u32(in);

    const std::size_t bits = dataset.num_neurons * dataset.num_steps;
    const std::size_t bytes = (bits + 7) / 8;
    std::vector<unsigned char> packed(bytes);
    dataset.examples.reserve(num_examples);
    for (std::uint32_t e = 0; e < num_examples; ++e) {
        unsigned char label_bytes[2];
        in.read(reinterpret_cast<char*>(label_bytes), 2);
        if (!in) {
            throw IoError("raster file: truncated at example " + std::to_string(e));
        }
        const std::uint16_t label =
            static_cast<std::uint16_t>(label_bytes[0] | (label_bytes[1] << 8));
        if (label >= dataset.num_classes) {
            throw IoError("raster file: label " + std::to_string(label) +
                          " >= num_classes " + std::to_string(dataset.num_classes));
        }
        in.read(reinterpret_cast<char*>(packed.data()),
                static_cast<std::streamsize>(packed.size()));
        if (!in) {
            throw IoError("raster file: truncated payload at example " + std::to_string(e));
        }

        Example example;
        example.label = label;
        SpikeRecord raster(dataset.num_neurons, dataset.num_steps);
        std::size_t bit = 0;
        for (std::size_t n = 0; n < dataset.num_neurons; ++n) {
            for (std::size_t s = 1; s <= dataset.num_steps; ++s, ++bit) {
                raster.set(n, s, (packed[bit / 8] & (0x80u >> (bit % 8))) != 0);
            }
        }
        example.raster = std::move(raster);
        dataset.examples.push_back(std::move(example));
    }

    if (in.peek() != std::ifstream::traits_type::eof()) {
        throw IoError("raster file: trailing data after the last example");
    }
    return dataset;
}

} // namespace fedsnn
