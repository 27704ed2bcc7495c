#include "conch/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace conch {

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t child_id) noexcept {
    return mix64(mix64(master_seed) ^ mix64(child_id + 0x632be59bd9b4e019ULL));
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_seed_(master_seed), stream_id_(stream_id),
      state_(derive_seed(master_seed, stream_id)) {}

double RngStream::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RngStream::laplace() {
    const double u = uniform_open() - 0.5;
    return u < 0 ? std::log1p(2.0 * u) : -std::log1p(-2.0 * u);
}

RngStream substream(std::uint64_t master_seed, std::uint64_t stream_id) {
    return RngStream(master_seed, stream_id);
}

} // namespace conch
