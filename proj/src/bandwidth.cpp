#include "agmmn/bandwidth.hpp"

#include "agmmn/distributions.hpp"
#include "agmmn/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace agmmn {

std::vector<double> prob_vector(std::size_t n_kernels) {
    if (n_kernels < 1) throw std::invalid_argument("prob_vector: need at least one kernel");
    std::vector<double> p(n_kernels);
    const auto n = static_cast<double>(n_kernels);
    for (std::size_t k = 0; k < n_kernels; ++k) p[k] = 0.95 * std::exp2(-9.0 * static_cast<double>(k) / n);
    return p;
}

std::size_t kernel_count(std::size_t update_index) {
    if (update_index > 40) throw std::out_of_range("kernel_count: update index too large");
    return std::size_t{6} << update_index;
}

int patience(int epoch) {
    if (epoch < 0) throw std::invalid_argument("patience: epoch must be non-negative");
    if (epoch <= 20) return 20;
    if (epoch <= 100) return 20 + (3 * (epoch - 20)) / 8;
    return 50;
}

double learning_rate(int n_updates, double initial) {
    if (n_updates < 0) throw std::invalid_argument("learning_rate: negative update count");
    if (!(initial > 0.0)) throw std::invalid_argument("learning_rate: initial rate must be positive");
    return initial * std::pow(5.0, -n_updates);
}

PairwiseDistances::PairwiseDistances(const Matrix& x, Index row_cap, std::uint64_t seed) {
    if (x.rows() < 2) throw DimensionError("pairwise distances need at least two rows");
    if (row_cap < 2) throw std::invalid_argument("pairwise distances: row cap must be >= 2");

    std::vector<Index> rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), Index{0});
    if (x.rows() > row_cap) {
        Rng rng(seed);
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(static_cast<std::size_t>(row_cap));
        std::sort(rows.begin(), rows.end());
    }
    rows_used_ = static_cast<Index>(rows.size());

    const std::size_t n = rows.size();
    sorted_.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            sorted_.push_back((x.row(rows[i]) - x.row(rows[j])).norm());
        }
    }
    std::sort(sorted_.begin(), sorted_.end());
    if (sorted_.back() <= 0.0) throw DegenerateData("all rows are identical; bandwidths would be zero");
}

double PairwiseDistances::quantile(double p) const {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("bandwidth quantile: probability must lie in (0,1]");
    const double q = empirical_quantile_sorted(sorted_, p);
    if (q > 0.0) return q;
    // Ties at distance 0 (duplicated rows) would give an invalid bandwidth;
    // fall back to the smallest positive distance.
    return *std::upper_bound(sorted_.begin(), sorted_.end(), 0.0);
}

KernelBank PairwiseDistances::quantile_bank(std::span<const double> probs) const {
    std::vector<double> h;
    h.reserve(probs.size());
    for (double p : probs) h.push_back(quantile(p));
    return KernelBank(std::move(h));
}

KernelBank pairwise_distance_quantiles(const Matrix& x, std::span<const double> probs, Index row_cap,
                                       std::uint64_t seed) {
    return PairwiseDistances(x, row_cap, seed).quantile_bank(probs);
}

}  // namespace agmmn
