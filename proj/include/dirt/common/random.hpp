#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace dirt {

using Rng = std::mt19937_64;

/// Mixes a stream index into a master seed (splitmix64 finalizer).
/// Distinct streams of one master seed give statistically independent generators.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

inline Rng make_rng(std::uint64_t master, std::uint64_t stream) {
    return Rng(derive_seed(master, stream));
}

double standard_normal(Rng& rng);
double uniform01(Rng& rng);  ///< open interval (0, 1)
void fill_standard_normal(Rng& rng, std::span<double> out);

}  // namespace dirt
