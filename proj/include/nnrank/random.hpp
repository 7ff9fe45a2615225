#pragma once

#include <cstdint>
#include <random>

#include "nnrank/tensor.hpp"

namespace nnrank {

using Rng = std::mt19937_64;

/// Independent stream seed for (base, stream) via the splitmix64 finalizer.
constexpr Seed derive_seed(Seed base, std::uint64_t stream) noexcept {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(Seed base, std::uint64_t stream) { return Rng(derive_seed(base, stream)); }

}  // namespace nnrank
