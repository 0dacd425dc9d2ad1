#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "agmmn/common.hpp"

namespace agmmn {

/// One row of a Joe-Kuo direction-number file: "d s a m_1 .. m_s".
struct DirectionEntry {
    int dim = 0;
    int degree = 0;
    std::uint32_t coefficients = 0;
    std::vector<std::uint32_t> initial;
};

/// Parses the Joe-Kuo text layout (a header line followed by one row per
/// dimension, starting at dimension 2). Throws std::invalid_argument on
/// malformed rows.
std::vector<DirectionEntry> parse_direction_numbers(std::string_view text);

/// 32-bit direction numbers for dimensions 1..max_dim().
class DirectionTable {
public:
    static constexpr int kBits = 32;

    explicit DirectionTable(const std::vector<DirectionEntry>& entries);

    /// Table compiled in from the bundled Joe-Kuo asset (1000 dimensions).
    static const DirectionTable& builtin();

    int max_dim() const { return static_cast<int>(v_.size()); }
    /// v[k] for k = 0..31 of dimension `dim` (0-based).
    const std::uint32_t* directions(int dim) const { return v_[static_cast<std::size_t>(dim)].data(); }

private:
    std::vector<std::vector<std::uint32_t>> v_;
};

/// Digitally shifted Sobol' stream in Gray-code order. Index 0 (the origin
/// before shifting) is skipped by default.
class SobolStream {
public:
    /// Unshifted stream (zero mask).
    explicit SobolStream(Index dim, const DirectionTable& table = DirectionTable::builtin());
    SobolStream(Index dim, std::vector<std::uint32_t> mask, const DirectionTable& table = DirectionTable::builtin());

    /// Stream with a random mask drawn from the "sobol-shift" substream of
    /// `seed` with counter `replicate`.
    static SobolStream shifted(Index dim, std::uint64_t seed, std::uint64_t replicate = 0,
                               const DirectionTable& table = DirectionTable::builtin());

    Index dim() const { return dim_; }
    const std::vector<std::uint32_t>& mask() const { return mask_; }
    std::uint64_t cursor() const { return cursor_; }
    void seek(std::uint64_t index) { cursor_ = index; }

    /// Points with indices first, first+1, ..., first+n-1 (shifted, in [0,1)).
    Matrix points(std::uint64_t first, Index n) const;
    /// Integer lattice points (shifted) for the same index range, row-major n x d.
    std::vector<std::uint32_t> lattice(std::uint64_t first, Index n) const;

    /// Next n points from the cursor; advances the cursor.
    Matrix next(Index n);

private:
    Index dim_;
    std::vector<std::uint32_t> mask_;
    const DirectionTable* table_;
    std::uint64_t cursor_ = 1;
};

/// n points of `stream` starting at its cursor; the stream is advanced.
Matrix sobol_points(SobolStream& stream, Index n);

struct TailCountResult {
    int dim = 0;
    std::uint64_t n_gen = 0;
    std::uint64_t n_tail = 0;
    double threshold = 0.0;
    std::vector<std::uint64_t> counts;  ///< one per replicate

    double mean() const;
    /// Sample variance (denominator B - 1).
    double variance() const;
};

enum class TailPointSet { Sobol, Iid };

/// Corner threshold 1 - (n_tail / n_gen)^(1/d).
double tail_threshold(int dim, std::uint64_t n_tail, std::uint64_t n_gen);

/// For every d in [d_min, d_max] and each of `replicates` randomizations,
/// counts the first n_gen = 5 * 2^d points (skip-zero) with every coordinate
/// above tail_threshold(d, n_tail, n_gen).
std::vector<TailCountResult> tail_count_study(int d_min, int d_max, std::uint64_t n_tail, int replicates,
                                              std::uint64_t seed, TailPointSet points = TailPointSet::Sobol);

}  // namespace agmmn
