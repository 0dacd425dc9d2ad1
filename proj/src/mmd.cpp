#include "agmmn/mmd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace agmmn {

namespace {

__extension__ typedef __int128 int128;

// Tiles are padded to a multiple of this many rows so that every kernel
// value goes through the same (vectorized) exp path; otherwise the scalar
// tail of a tile could round differently from the packet body.
constexpr Index kRowPad = 8;

// Kernel values below ~1e-280 are stored as exact zeros: they are far below
// the fixed-point resolution, and subnormal arithmetic is very slow.
constexpr double kMinExponent = -645.0;
constexpr double kTinyRoot = 1e-70;  // kTinyRoot^4 stays a normal number

/// Order-independent sum of values in [0, bound]: each term is truncated to
/// a fixed-point grid fine enough (~1e-18 relative to bound) to be
/// negligible, and integer addition is associative.
class FixedPointSum {
public:
    explicit FixedPointSum(double bound) {
        const auto ceil_log2 = static_cast<int>(std::bit_width(static_cast<std::uint64_t>(std::ceil(bound))));
        scale_ = std::ldexp(1.0, 62 - ceil_log2);
    }
    void add(double v) { acc_ += static_cast<std::int64_t>(v * scale_); }
    void merge(const FixedPointSum& other) { acc_ += other.acc_; }
    double value() const { return static_cast<double>(acc_) / scale_; }

private:
    double scale_ = 1.0;
    int128 acc_ = 0;
};

struct Tile {
    Eigen::ArrayXXd dist;
    std::vector<Eigen::ArrayXXd> powers;  // one kernel per bandwidth
    Eigen::ArrayXXd kernel;
    Eigen::ArrayXXd weight;  // sum_l k_l / h_l^2
    Index rows = 0;
    Index cols = 0;
};

void check_compatible(const Matrix& a, const Matrix& b, const KernelBank& bank, const char* what) {
    if (bank.empty()) throw std::invalid_argument(std::string(what) + ": empty kernel bank");
    if (a.cols() != b.cols()) {
        throw DimensionError(std::string(what) + ": samples have " + std::to_string(a.cols()) + " and " +
                             std::to_string(b.cols()) + " columns");
    }
    if (a.rows() < 1 || b.rows() < 1) throw DimensionError(std::string(what) + ": empty sample");
}

// e[i] = 0 where key[i] < bound (below) or key[i] > bound (!below).
void zero_where(const Eigen::ArrayXXd& key, double bound, bool below, Eigen::ArrayXXd& e) {
    const double* k = key.data();
    double* out = e.data();
    const Index n = e.size();
    if (below) {
        for (Index i = 0; i < n; ++i) out[i] = k[i] < bound ? 0.0 : out[i];
    } else {
        for (Index i = 0; i < n; ++i) out[i] = k[i] > bound ? 0.0 : out[i];
    }
}

void compute_tile(const Matrix& a, Index a0, Index na, const Matrix& b, Index b0, Index nb, const KernelBank& bank,
                  bool with_weights, Tile& tile) {
    const Index padded = (na + kRowPad - 1) / kRowPad * kRowPad;
    tile.rows = na;
    tile.cols = nb;
    tile.dist.setZero(padded, nb);
    const Index dim = a.cols();
    for (Index j = 0; j < nb; ++j) {
        double* col = tile.dist.col(j).data();
        for (Index k = 0; k < dim; ++k) {
            const double bjk = b(b0 + j, k);
            const double* acol = a.col(k).data() + a0;
            for (Index i = 0; i < na; ++i) {
                const double diff = acol[i] - bjk;
                col[i] += diff * diff;
            }
        }
    }
    tile.kernel.setZero(padded, nb);
    if (with_weights) tile.weight.setZero(padded, nb);
    // With 2h also in the bank, exp(-d/2h^2) = exp(-d/2(2h)^2)^4: two squarings replace an exp.
    const auto& hs = bank.bandwidths();
    const std::size_t count = hs.size();
    if (tile.powers.size() < count) tile.powers.resize(count);
    for (std::size_t l = count; l-- > 0;) {
        const double h = hs[l];
        std::size_t source = count;
        for (std::size_t m = l + 1; m < count; ++m) {
            if (hs[m] == 2.0 * h) source = m;
        }
        Eigen::ArrayXXd& e = tile.powers[l];
        if (source < count) {
            const Eigen::ArrayXXd& base = tile.powers[source];
            e = base.square().square();
            zero_where(base, kTinyRoot, true, e);
        } else {
            const double coef = -0.5 / (h * h);
            e = (tile.dist * coef).max(kMinExponent).exp();
            zero_where(tile.dist, kMinExponent / coef, false, e);
        }
        tile.kernel += e;
        if (with_weights) tile.weight += e * (1.0 / (h * h));
    }
}

void accumulate(const Tile& tile, FixedPointSum& sum) {
    for (Index j = 0; j < tile.cols; ++j) {
        const double* col = tile.kernel.col(j).data();
        for (Index i = 0; i < tile.rows; ++i) sum.add(col[i]);
    }
}

Index block_of(const MmdOptions& options) {
    if (options.block_rows < 1) throw std::invalid_argument("MmdOptions: block_rows must be >= 1");
    return options.block_rows;
}

// Adds coef * sum_i W_ji (B_i - Y_j) to grad rows j of the tile.
void add_gradient(const Tile& tile, const Matrix& y, Index y0, const Matrix& b, Index b0, double coef,
                  Matrix& grad) {
    const auto w = tile.weight.topRows(tile.rows).matrix();
    const Vector row_sums = w.rowwise().sum();
    grad.middleRows(y0, tile.rows).noalias() += coef * (w * b.middleRows(b0, tile.cols));
    grad.middleRows(y0, tile.rows).noalias() -=
        coef * (row_sums.asDiagonal() * y.middleRows(y0, tile.rows));
}

// Same as add_gradient for the mirrored tile: rows y0.. of grad receive the
// column sums of the tile.
void add_gradient_transposed(const Tile& tile, const Matrix& y, Index y0, const Matrix& b, Index b0, double coef,
                             Matrix& grad) {
    const auto w = tile.weight.topRows(tile.rows).matrix();
    const Vector col_sums = w.colwise().sum().transpose();
    grad.middleRows(y0, tile.cols).noalias() += coef * (w.transpose() * b.middleRows(b0, tile.rows));
    grad.middleRows(y0, tile.cols).noalias() -=
        coef * (col_sums.asDiagonal() * y.middleRows(y0, tile.cols));
}

}  // namespace

KernelBank::KernelBank(std::vector<double> bandwidths) : bandwidths_(std::move(bandwidths)) {
    if (bandwidths_.empty()) throw std::invalid_argument("KernelBank: no bandwidths");
    for (double h : bandwidths_) {
        if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("KernelBank: bandwidths must be positive");
    }
    std::sort(bandwidths_.begin(), bandwidths_.end());
}

const KernelBank& validation_bank() {
    static const KernelBank bank({0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95});
    return bank;
}

const KernelBank& hpz_bank() {
    static const KernelBank bank({0.001, 0.01, 0.15, 0.25, 0.50, 0.75});
    return bank;
}

double rbf(std::span<const double> x, std::span<const double> y, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("rbf: bandwidth must be positive");
    if (x.size() != y.size()) throw DimensionError("rbf: dimension mismatch");
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) sq += (x[k] - y[k]) * (x[k] - y[k]);
    return std::exp(-sq / (2.0 * bandwidth * bandwidth));
}

double mixture_kernel(std::span<const double> x, std::span<const double> y, const KernelBank& bank) {
    if (bank.empty()) throw std::invalid_argument("mixture_kernel: empty kernel bank");
    double total = 0.0;
    for (double h : bank.bandwidths()) total += rbf(x, y, h);
    return total;
}

namespace {

// k(a_i, a_j) == k(a_j, a_i) bit for bit, so off-diagonal tiles count twice.
double self_sum(const Matrix& a, const KernelBank& bank, Index block) {
    FixedPointSum sum(static_cast<double>(bank.size()));
    thread_local Tile tile;
    for (Index a0 = 0; a0 < a.rows(); a0 += block) {
        const Index na = std::min(block, a.rows() - a0);
        for (Index b0 = a0; b0 < a.rows(); b0 += block) {
            const Index nb = std::min(block, a.rows() - b0);
            compute_tile(a, a0, na, a, b0, nb, bank, false, tile);
            FixedPointSum part(static_cast<double>(bank.size()));
            accumulate(tile, part);
            sum.merge(part);
            if (b0 != a0) sum.merge(part);
        }
    }
    return sum.value();
}

}  // namespace

double kernel_sum(const Matrix& a, const Matrix& b, const KernelBank& bank, const MmdOptions& options) {
    check_compatible(a, b, bank, "kernel_sum");
    const Index block = block_of(options);
    if (&a == &b) return self_sum(a, bank, block);
    FixedPointSum sum(static_cast<double>(bank.size()));
    thread_local Tile tile;
    for (Index a0 = 0; a0 < a.rows(); a0 += block) {
        const Index na = std::min(block, a.rows() - a0);
        for (Index b0 = 0; b0 < b.rows(); b0 += block) {
            const Index nb = std::min(block, b.rows() - b0);
            compute_tile(a, a0, na, b, b0, nb, bank, false, tile);
            accumulate(tile, sum);
        }
    }
    return sum.value();
}

Matrix kernel_matrix(const Matrix& a, const Matrix& b, const KernelBank& bank, const MmdOptions& options) {
    check_compatible(a, b, bank, "kernel_matrix");
    const Index block = block_of(options);
    Matrix out(a.rows(), b.rows());
    thread_local Tile tile;
    for (Index a0 = 0; a0 < a.rows(); a0 += block) {
        const Index na = std::min(block, a.rows() - a0);
        for (Index b0 = 0; b0 < b.rows(); b0 += block) {
            const Index nb = std::min(block, b.rows() - b0);
            compute_tile(a, a0, na, b, b0, nb, bank, false, tile);
            out.block(a0, b0, na, nb) = tile.kernel.topRows(na).matrix();
        }
    }
    return out;
}

double clamped_sqrt(double radicand) {
    if (std::isnan(radicand)) throw NumericFailure("MMD radicand is NaN");
    if (radicand < 0.0) {
        if (radicand < -1e-12) throw NumericFailure("MMD radicand " + std::to_string(radicand) + " is negative");
        return 0.0;
    }
    return std::sqrt(radicand);
}

namespace {

double combine(double sxx, double syy, double sxy, Index n, Index m) {
    const double dn = static_cast<double>(n);
    const double dm = static_cast<double>(m);
    const double cross = sxy / (dn * dm);
    // Grouped so that X == Y cancels exactly and swapping X, Y only
    // commutes the outer addition.
    return (sxx / (dn * dn) - cross) + (syy / (dm * dm) - cross);
}

}  // namespace

double mmd_squared(const Matrix& x, const Matrix& y, const KernelBank& bank, const MmdOptions& options) {
    check_compatible(x, y, bank, "mmd");
    const double sxx = kernel_sum(x, x, bank, options);
    const double syy = kernel_sum(y, y, bank, options);
    const double sxy = kernel_sum(x, y, bank, options);
    return combine(sxx, syy, sxy, x.rows(), y.rows());
}

double mmd(const Matrix& x, const Matrix& y, const KernelBank& bank, const MmdOptions& options) {
    return clamped_sqrt(mmd_squared(x, y, bank, options));
}

MmdGradient mmd_squared_and_grad(const Matrix& x, const Matrix& y, const KernelBank& bank,
                                 const MmdOptions& options) {
    check_compatible(x, y, bank, "mmd gradient");
    const Index block = block_of(options);
    const Index n = x.rows();
    const Index m = y.rows();
    const double coef_yy = 2.0 / (static_cast<double>(m) * static_cast<double>(m));
    const double coef_xy = -2.0 / (static_cast<double>(n) * static_cast<double>(m));

    MmdGradient result;
    result.grad_y = Matrix::Zero(m, y.cols());
    FixedPointSum syy(static_cast<double>(bank.size()));
    FixedPointSum sxy(static_cast<double>(bank.size()));
    thread_local Tile tile;
    for (Index y0 = 0; y0 < m; y0 += block) {
        const Index ny = std::min(block, m - y0);
        for (Index b0 = y0; b0 < m; b0 += block) {
            const Index nb = std::min(block, m - b0);
            compute_tile(y, y0, ny, y, b0, nb, bank, true, tile);
            FixedPointSum part(static_cast<double>(bank.size()));
            accumulate(tile, part);
            syy.merge(part);
            // i == j terms vanish; dropping them avoids cancelling large weights
            if (b0 == y0) {
                for (Index i = 0; i < ny; ++i) tile.weight(i, i) = 0.0;
            }
            add_gradient(tile, y, y0, y, b0, coef_yy, result.grad_y);
            if (b0 != y0) {
                syy.merge(part);
                add_gradient_transposed(tile, y, b0, y, y0, coef_yy, result.grad_y);
            }
        }
        for (Index b0 = 0; b0 < n; b0 += block) {
            const Index nb = std::min(block, n - b0);
            compute_tile(y, y0, ny, x, b0, nb, bank, true, tile);
            accumulate(tile, sxy);
            add_gradient(tile, y, y0, x, b0, coef_xy, result.grad_y);
        }
    }
    const double sxx = kernel_sum(x, x, bank, options);
    result.mmd_squared = combine(sxx, syy.value(), sxy.value(), n, m);
    return result;
}

Matrix mmd_sq_grad_y(const Matrix& x, const Matrix& y, const KernelBank& bank, const MmdOptions& options) {
    return mmd_squared_and_grad(x, y, bank, options).grad_y;
}

double validation_mmd(const Matrix& x, std::span<const Matrix> samples, const MmdOptions& options) {
    return validation_mmd(x, kernel_sum(x, x, validation_bank(), options), samples, options);
}

double validation_mmd(const Matrix& x, double sxx, std::span<const Matrix> samples, const MmdOptions& options) {
    if (samples.empty()) throw std::invalid_argument("validation_mmd: no generated samples");
    double total = 0.0;
    for (const Matrix& y : samples) {
        if (y.rows() != x.rows() || y.cols() != x.cols()) {
            throw DimensionError("validation_mmd: generated sample shape differs from data");
        }
        const double syy = kernel_sum(y, y, validation_bank(), options);
        const double sxy = kernel_sum(x, y, validation_bank(), options);
        total += clamped_sqrt(combine(sxx, syy, sxy, x.rows(), y.rows()));
    }
    return total / static_cast<double>(samples.size());
}

}  // namespace agmmn
