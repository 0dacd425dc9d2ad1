#include "agmmn/copula.hpp"

#include "agmmn/distributions.hpp"
#include "agmmn/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace agmmn {

namespace {

constexpr Index kSampleBlock = 4096;

void check_tau(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("Kendall's tau must lie in (0,1)");
}

// Positive stable variate with Laplace transform exp(-s^alpha), 0 < alpha < 1
// (Chambers-Mallows-Stuck in Kanter's form).
double positive_stable(double alpha, Rng& rng) {
    std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
    std::exponential_distribution<double> expo(1.0);
    double u = angle(rng);
    while (u == 0.0) u = angle(rng);
    const double e = expo(rng);
    const double a = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
    const double b = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
    return a * b;
}

void sample_block(const ResolvedCopula& c, Index rows, Rng& rng, Eigen::Ref<Matrix> out) {
    const Index d = c.dim;
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    switch (c.family) {
        case CopulaFamily::Clayton: {
            std::gamma_distribution<double> frailty(1.0 / c.theta, 1.0);
            for (Index i = 0; i < rows; ++i) {
                const double v = frailty(rng);
                for (Index j = 0; j < d; ++j) {
                    out(i, j) = clamp_open_unit(std::exp(-std::log1p(expo(rng) / v) / c.theta));
                }
            }
            break;
        }
        case CopulaFamily::Gumbel: {
            const double alpha = 1.0 / c.theta;
            for (Index i = 0; i < rows; ++i) {
                const double v = positive_stable(alpha, rng);
                for (Index j = 0; j < d; ++j) {
                    out(i, j) = clamp_open_unit(std::exp(-std::pow(expo(rng) / v, alpha)));
                }
            }
            break;
        }
        case CopulaFamily::Gaussian:
        case CopulaFamily::StudentT: {
            std::chi_squared_distribution<double> chi2(c.df);
            Vector z(d);
            for (Index i = 0; i < rows; ++i) {
                for (Index j = 0; j < d; ++j) z(j) = normal(rng);
                Vector x = c.cholesky.triangularView<Eigen::Lower>() * z;
                if (c.family == CopulaFamily::Gaussian) {
                    for (Index j = 0; j < d; ++j) out(i, j) = clamp_open_unit(normal_cdf(x(j)));
                } else {
                    const double scale = std::sqrt(c.df / chi2(rng));
                    for (Index j = 0; j < d; ++j) out(i, j) = clamp_open_unit(student_t_cdf(x(j) * scale, c.df));
                }
            }
            break;
        }
    }
}

}  // namespace

std::string to_string(CopulaFamily family) {
    switch (family) {
        case CopulaFamily::Clayton: return "clayton";
        case CopulaFamily::Gumbel: return "gumbel";
        case CopulaFamily::Gaussian: return "gaussian";
        case CopulaFamily::StudentT: return "t";
    }
    return "unknown";
}

CopulaFamily parse_copula_family(std::string_view name) {
    if (name == "clayton") return CopulaFamily::Clayton;
    if (name == "gumbel") return CopulaFamily::Gumbel;
    if (name == "gaussian" || name == "normal") return CopulaFamily::Gaussian;
    if (name == "t" || name == "student-t") return CopulaFamily::StudentT;
    throw std::invalid_argument("unknown copula family '" + std::string(name) + "'");
}

double clamp_open_unit(double u) {
    return std::clamp(u, std::numeric_limits<double>::min(), 1.0 - 0x1.0p-53);
}

double clayton_theta_from_tau(double tau) {
    check_tau(tau);
    return 2.0 * tau / (1.0 - tau);
}

double gumbel_theta_from_tau(double tau) {
    check_tau(tau);
    return 1.0 / (1.0 - tau);
}

double elliptical_rho_from_tau(double tau) {
    check_tau(tau);
    return std::sin(std::numbers::pi * tau / 2.0);
}

double kendall_tau(const ResolvedCopula& c) {
    switch (c.family) {
        case CopulaFamily::Clayton: return c.theta / (c.theta + 2.0);
        case CopulaFamily::Gumbel: return 1.0 - 1.0 / c.theta;
        case CopulaFamily::Gaussian:
        case CopulaFamily::StudentT: return 2.0 / std::numbers::pi * std::asin(c.correlation(0, 1));
    }
    return 0.0;
}

Matrix exchangeable_correlation(Index dim, double rho) {
    Matrix r = Matrix::Constant(dim, dim, rho);
    r.diagonal().setOnes();
    return r;
}

ResolvedCopula resolve(const CopulaSpec& spec) {
    if (spec.dim < 2) throw std::invalid_argument("copula dimension must be >= 2");
    ResolvedCopula c;
    c.family = spec.family;
    c.dim = spec.dim;
    c.df = spec.df;
    switch (spec.family) {
        case CopulaFamily::Clayton:
            c.theta = spec.theta ? *spec.theta : clayton_theta_from_tau(spec.tau.value_or(-1.0));
            if (!(c.theta > 0.0) || !std::isfinite(c.theta)) throw std::invalid_argument("Clayton theta must be > 0");
            break;
        case CopulaFamily::Gumbel:
            c.theta = spec.theta ? *spec.theta : gumbel_theta_from_tau(spec.tau.value_or(-1.0));
            // theta == 1 is independence; the frailty construction needs theta > 1.
            if (!(c.theta > 1.0) || !std::isfinite(c.theta)) throw std::invalid_argument("Gumbel theta must be > 1");
            break;
        case CopulaFamily::Gaussian:
        case CopulaFamily::StudentT: {
            if (spec.family == CopulaFamily::StudentT && !(spec.df > 0.0)) {
                throw std::invalid_argument("t copula degrees of freedom must be positive");
            }
            if (spec.correlation) {
                c.correlation = *spec.correlation;
                if (c.correlation.rows() != spec.dim || c.correlation.cols() != spec.dim) {
                    throw std::invalid_argument("correlation matrix shape differs from copula dimension");
                }
            } else {
                const double rho = spec.rho ? *spec.rho : elliptical_rho_from_tau(spec.tau.value_or(-1.0));
                if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("correlation must lie in (-1,1)");
                c.correlation = exchangeable_correlation(spec.dim, rho);
            }
            Eigen::LLT<Matrix> llt(c.correlation);
            if (llt.info() != Eigen::Success) throw std::invalid_argument("correlation matrix is not positive definite");
            c.cholesky = llt.matrixL();
            break;
        }
    }
    return c;
}

Matrix sample_copula(const ResolvedCopula& c, Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample size must be >= 1");
    Matrix out(n, c.dim);
    // Fixed-size blocks with their own substreams: block b is reproducible
    // on its own and blocks can be filled in any order.
    for (Index start = 0, block = 0; start < n; start += kSampleBlock, ++block) {
        const Index rows = std::min(kSampleBlock, n - start);
        Rng rng = make_rng(seed, "copula-block", static_cast<std::uint64_t>(block));
        sample_block(c, rows, rng, out.middleRows(start, rows));
    }
    return out;
}

Matrix pseudo_obs(const Matrix& y) {
    const Index n = y.rows();
    Matrix u(n, y.cols());
    std::vector<double> sorted(static_cast<std::size_t>(n));
    const double denom = static_cast<double>(n) + 1.0;
    for (Index j = 0; j < y.cols(); ++j) {
        for (Index i = 0; i < n; ++i) sorted[static_cast<std::size_t>(i)] = y(i, j);
        std::sort(sorted.begin(), sorted.end());
        for (Index i = 0; i < n; ++i) {
            const auto rank = std::upper_bound(sorted.begin(), sorted.end(), y(i, j)) - sorted.begin();
            u(i, j) = static_cast<double>(rank) / denom;
        }
    }
    return u;
}

bool supports_rosenblatt(CopulaFamily family) {
    return family == CopulaFamily::Clayton || family == CopulaFamily::Gaussian;
}

Matrix rosenblatt_inverse(const ResolvedCopula& c, const Matrix& v) {
    if (!supports_rosenblatt(c.family)) {
        throw Unsupported("inverse Rosenblatt transform is not available for the " + to_string(c.family) + " copula");
    }
    if (v.cols() != c.dim) throw DimensionError("rosenblatt_inverse: point dimension differs from copula dimension");
    const Index n = v.rows();
    const Index d = c.dim;
    Matrix u(n, d);
    if (c.family == CopulaFamily::Clayton) {
        const double theta = c.theta;
        for (Index i = 0; i < n; ++i) {
            // s accumulates sum_{k<j} (u_k^-theta - 1), the generator inverse.
            double s = 0.0;
            for (Index j = 0; j < d; ++j) {
                const double vij = v(i, j);
                double uij;
                if (j == 0) {
                    uij = vij;
                } else {
                    const double expo = -theta / (1.0 + theta * static_cast<double>(j));
                    const double t = (1.0 + s) * std::expm1(expo * std::log(vij));
                    uij = std::exp(-std::log1p(t) / theta);
                }
                uij = clamp_open_unit(uij);
                u(i, j) = uij;
                s += std::expm1(-theta * std::log(uij));
            }
        }
    } else {
        Vector z(d);
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < d; ++j) z(j) = normal_quantile(clamp_open_unit(v(i, j)));
            const Vector x = c.cholesky.triangularView<Eigen::Lower>() * z;
            for (Index j = 0; j < d; ++j) u(i, j) = clamp_open_unit(normal_cdf(x(j)));
        }
    }
    return u;
}

}  // namespace agmmn
