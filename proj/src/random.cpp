#include "agmmn/random.hpp"

namespace agmmn {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream, std::uint64_t counter) {
    return splitmix64(splitmix64(splitmix64(root) ^ fnv1a(stream)) ^ counter);
}

Matrix standard_normal_matrix(Index n, Index d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix out(n, d);
    // Row-major fill so that a prefix of rows does not depend on d.
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) out(i, j) = normal(rng);
    return out;
}

Matrix uniform_matrix(Index n, Index d, Rng& rng) {
    Matrix out(n, d);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) {
            // 53-bit grid shifted by half a step: strictly inside (0,1).
            out(i, j) = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
        }
    }
    return out;
}

}  // namespace agmmn
