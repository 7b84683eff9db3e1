#pragma once

#include <array>
#include <cstdint>

namespace ismp {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Streams are addressed by (seed, stream). Draws depend only on the stream
// state, never on other streams, so path-parallel simulation is bitwise
// reproducible under any thread schedule.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    // Uniform on (0, 1).
    double uniform();

    // Standard normal via Box-Muller (one spare cached per pair).
    double normal();

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 2> key,
                                              std::array<std::uint32_t, 4> ctr);

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int avail_ = 0;            // uint32 lanes left in buf_
    double cached_normal_ = 0.0;
    bool have_normal_ = false;
};

// Cheap integer mix used to derive sub-seeds (SplitMix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

} // namespace ismp
