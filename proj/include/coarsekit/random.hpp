#pragma once

#include <cstdint>
#include <random>

#include "coarsekit/linalg.hpp"

namespace coarsekit {

using Rng = std::mt19937_64;

/// Seed for trial `index` of a run seeded with `seed` (splitmix64 finalizer),
/// so trials can be replayed independently.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

double uniform01(Rng& rng);

/// Entries i.i.d. standard complex Gaussian.
CMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

/// Haar-random isometry (rows >= cols): Gram-Schmidt QR of a Gaussian matrix
/// with the R diagonal made positive.
CMatrix haar_isometry(std::size_t rows, std::size_t cols, Rng& rng);
CMatrix haar_unitary(std::size_t n, Rng& rng);

/// Haar-random pure state as a column vector.
CMatrix random_pure_vector(std::size_t n, Rng& rng);
CMatrix random_pure_state(std::size_t n, Rng& rng);
/// Ginibre-distributed mixed state G G^* / tr(G G^*) with G n x rank.
CMatrix random_mixed_state(std::size_t n, std::size_t rank, Rng& rng);
CMatrix random_hermitian(std::size_t n, Rng& rng);

}  // namespace coarsekit
