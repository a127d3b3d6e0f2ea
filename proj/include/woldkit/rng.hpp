#pragma once

#include <cstdint>

#include "woldkit/types.hpp"

namespace woldkit {

// Stable seed derivation so unrelated draws from one base seed do not
// correlate (splitmix64 round on base ^ salt).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

// Matrix of standard complex Gaussians from a seeded mt19937_64.
ComplexMatrix seeded_gaussian(Index rows, Index cols, std::uint64_t seed);

// Haar-distributed unitary: QR of a complex Gaussian with the phases of the
// R diagonal absorbed into Q, which makes the draw distribution-correct and
// deterministic for a given seed.
ComplexMatrix seeded_unitary(Index n, std::uint64_t seed);

}  // namespace woldkit
