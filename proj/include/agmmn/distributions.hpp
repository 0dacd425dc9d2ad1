#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace agmmn {

/// Standard normal distribution function.
double normal_cdf(double x);

/// Standard normal quantile (Wichura's AS 241, relative error ~1e-16).
/// Returns -inf/+inf at 0/1.
double normal_quantile(double p);

/// Student t distribution function and quantile with `df` degrees of freedom.
double student_t_cdf(double x, double df);
double student_t_quantile(double p, double df);

/// Smallest sorted[k-1] with k/n >= p, i.e. the inverse of the empirical
/// distribution function (inf convention). `sorted` must be ascending.
double empirical_quantile_sorted(std::span<const double> sorted, double p);

/// Position k (1-based) used by empirical_quantile_sorted.
std::size_t empirical_quantile_rank(std::size_t n, double p);

}  // namespace agmmn
