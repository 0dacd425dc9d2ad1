#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "agmmn/common.hpp"
#include "agmmn/mmd.hpp"

namespace agmmn {

/// Quantile probabilities p_k = 0.95 * 2^(-9 (k-1) / n_kernels), k = 1..n_kernels.
std::vector<double> prob_vector(std::size_t n_kernels);

/// Number of kernels after `update_index` bandwidth updates: 6 * 2^update_index.
std::size_t kernel_count(std::size_t update_index);

/// Patience in epoch t: 20 for t <= 20, floor(20 + 3/8 (t - 20)) up to
/// t = 100, 50 afterwards.
int patience(int epoch);

/// Learning rate after `n_updates` bandwidth updates: initial / 5^n_updates.
double learning_rate(int n_updates, double initial = 1e-3);

/// Sorted pairwise Euclidean distances of the rows of `x`. When x has more
/// than `row_cap` rows a seeded subsample of row_cap rows (without
/// replacement) is used instead.
class PairwiseDistances {
public:
    PairwiseDistances(const Matrix& x, Index row_cap, std::uint64_t seed);

    /// Inverse empirical distribution function at each probability, returned
    /// as a kernel bank (ascending). Throws DegenerateData if every distance is 0.
    KernelBank quantile_bank(std::span<const double> probs) const;

    double quantile(double p) const;

    const std::vector<double>& sorted() const { return sorted_; }
    Index rows_used() const { return rows_used_; }

private:
    std::vector<double> sorted_;
    Index rows_used_ = 0;
};

/// One-shot convenience wrapper around PairwiseDistances.
KernelBank pairwise_distance_quantiles(const Matrix& x, std::span<const double> probs, Index row_cap,
                                       std::uint64_t seed);

}  // namespace agmmn
