#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "agmmn/common.hpp"

namespace agmmn {

using Rng = std::mt19937_64;

/// Derives an independent seed for a named substream ("init", "shuffle",
/// "prior", "sobol-shift", "subsample", ...) and a counter from a single
/// global seed. The mapping depends only on its arguments, never on the
/// order in which substreams are requested.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t counter = 0);

inline Rng make_rng(std::uint64_t root, std::string_view stream, std::uint64_t counter = 0) {
    return Rng(derive_seed(root, stream, counter));
}

/// n x d matrix of iid standard normals.
Matrix standard_normal_matrix(Index n, Index d, Rng& rng);

/// n x d matrix of iid U(0,1) draws, never exactly 0.
Matrix uniform_matrix(Index n, Index d, Rng& rng);

}  // namespace agmmn
