#pragma once

// Deterministic random streams.
//
// Every stream is a counter-based SplitMix64 sequence: draw k is the
// SplitMix64 finalizer applied to key + k * golden gamma, with the key a mix of
// (master_seed, stream_id). Bounded integers, uniforms and normals are derived
// here rather than through <random> distributions, whose output is
// implementation-defined, so a given (master_seed, stream_id) produces the
// same draws with any standard library.

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace conch {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer (with the gamma increment folded in).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += kGoldenGamma;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a child computation, e.g. replicate r of an experiment.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t child_id) noexcept;

class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept {
        const std::uint64_t x = state_;
        state_ += kGoldenGamma;
        return mix64(x);
    }

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1).
    double uniform_open();
    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("RngStream::below needs a positive bound");
        // Lemire's multiply-shift with rejection; unbiased.
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }
    /// Standard normal (Box-Muller, one variate per call).
    double normal();
    /// Laplace(location 0, scale 1).
    double laplace();

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_;
};

RngStream substream(std::uint64_t master_seed, std::uint64_t stream_id);

} // namespace conch
