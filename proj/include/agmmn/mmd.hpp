#pragma once

#include <span>
#include <vector>

#include "agmmn/common.hpp"

namespace agmmn {

/// Bandwidths of a mixture RBF kernel, kept sorted ascending.
class KernelBank {
public:
    KernelBank() = default;
    /// Throws std::invalid_argument if empty or any bandwidth is not a
    /// positive finite number.
    explicit KernelBank(std::vector<double> bandwidths);

    const std::vector<double>& bandwidths() const { return bandwidths_; }
    std::size_t size() const { return bandwidths_.size(); }
    bool empty() const { return bandwidths_.empty(); }

    bool operator==(const KernelBank&) const = default;

private:
    std::vector<double> bandwidths_;
};

/// Fixed bank used for the validation MMD: (0.05, 0.1, 0.2, ..., 0.9, 0.95).
const KernelBank& validation_bank();

/// Hard-coded GMMN benchmark bank (0.001, 0.01, 0.15, 0.25, 0.50, 0.75).
const KernelBank& hpz_bank();

double rbf(std::span<const double> x, std::span<const double> y, double bandwidth);
double mixture_kernel(std::span<const double> x, std::span<const double> y, const KernelBank& bank);

struct MmdOptions {
    /// Kernel matrices are materialized in tiles of at most block_rows x block_rows.
    Index block_rows = 128;
};

/// Sum over all pairs of mixture-kernel values between rows of `a` and rows
/// of `b`. The sum is accumulated in fixed point, so it does not depend on
/// row order or tiling.
double kernel_sum(const Matrix& a, const Matrix& b, const KernelBank& bank, const MmdOptions& options = {});

/// Full mixture-kernel matrix [a.rows() x b.rows()], built tile by tile.
Matrix kernel_matrix(const Matrix& a, const Matrix& b, const KernelBank& bank, const MmdOptions& options = {});

/// Biased (V-statistic) squared MMD between the row samples X and Y.
double mmd_squared(const Matrix& x, const Matrix& y, const KernelBank& bank, const MmdOptions& options = {});

/// sqrt(max(mmd_squared, 0)); radicands below -1e-12 raise NumericFailure.
double mmd(const Matrix& x, const Matrix& y, const KernelBank& bank, const MmdOptions& options = {});

struct MmdGradient {
    double mmd_squared = 0.0;
    Matrix grad_y;  // d MMD^2 / d Y, same shape as Y
};

/// Squared MMD together with its gradient w.r.t. the generated sample Y.
MmdGradient mmd_squared_and_grad(const Matrix& x, const Matrix& y, const KernelBank& bank,
                                 const MmdOptions& options = {});

Matrix mmd_sq_grad_y(const Matrix& x, const Matrix& y, const KernelBank& bank, const MmdOptions& options = {});

/// Average over `samples` of mmd(x, sample, validation_bank()).
double validation_mmd(const Matrix& x, std::span<const Matrix> samples, const MmdOptions& options = {});

/// As above with sxx = kernel_sum(x, x, validation_bank()) supplied by the caller.
double validation_mmd(const Matrix& x, double sxx, std::span<const Matrix> samples, const MmdOptions& options = {});

/// Square root with the 1e-12 negative-radicand tolerance used throughout.
double clamped_sqrt(double radicand);

}  // namespace agmmn
