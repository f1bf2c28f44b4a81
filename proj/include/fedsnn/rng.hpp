#pragma once

#include <cstdint>
#include <random>

namespace fedsnn {

// Deterministic per-device random stream. mt19937_64 is fully specified by the
// standard, so identical seeds give identical sequences on every platform.
// All draws go through next_double() so that "one sample = one engine call"
// holds; std::uniform_real_distribution is avoided because the number of
// engine calls it makes is implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of mantissa, exactly one engine call.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform in [0, n). Fine for data selection; n must be << 2^53.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(next_double() * static_cast<double>(n));
    }

private:
    std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent sub-stream seeds (data selection, evaluation, init) derived
// from one experiment seed. Device learner streams use global_seed ^ device_id
// directly; this is only for auxiliary streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    return splitmix64(base ^ splitmix64(tag));
}

} // namespace fedsnn
