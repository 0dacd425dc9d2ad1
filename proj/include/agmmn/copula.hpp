#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "agmmn/common.hpp"

namespace agmmn {

enum class CopulaFamily { Clayton, Gumbel, Gaussian, StudentT };

std::string to_string(CopulaFamily family);
CopulaFamily parse_copula_family(std::string_view name);

/// User-facing copula description. Either `tau` (pairwise Kendall's tau of
/// an exchangeable model) or an explicit parameter must be given: `theta`
/// for Archimedean families, `rho` or a full `correlation` matrix for the
/// elliptical ones.
struct CopulaSpec {
    CopulaFamily family = CopulaFamily::Clayton;
    Index dim = 2;
    std::optional<double> tau;
    std::optional<double> theta;
    std::optional<double> rho;
    std::optional<Matrix> correlation;
    double df = 4.0;  ///< degrees of freedom of the t copula
};

/// Fully resolved parameters ready for sampling.
struct ResolvedCopula {
    CopulaFamily family = CopulaFamily::Clayton;
    Index dim = 2;
    double theta = 0.0;     ///< Clayton / Gumbel parameter
    Matrix correlation;     ///< Gaussian / t correlation matrix
    Matrix cholesky;        ///< lower Cholesky factor of `correlation`
    double df = 4.0;
};

/// Clayton 2 tau/(1-tau).
double clayton_theta_from_tau(double tau);
/// Gumbel 1/(1-tau).
double gumbel_theta_from_tau(double tau);
/// Elliptical sin(pi tau / 2).
double elliptical_rho_from_tau(double tau);

/// Kendall's tau implied by a resolved bivariate margin of the copula.
double kendall_tau(const ResolvedCopula& copula);

/// Validates the spec and converts tau to model parameters. Throws
/// std::invalid_argument for tau outside (0,1), invalid parameters or a
/// correlation matrix that is not positive definite.
ResolvedCopula resolve(const CopulaSpec& spec);

/// Equicorrelation matrix with off-diagonal rho.
Matrix exchangeable_correlation(Index dim, double rho);

/// n pseudo-random draws in (0,1)^d. Clayton uses a Gamma frailty, Gumbel a
/// positive-stable frailty (Chambers-Mallows-Stuck), the elliptical
/// families correlated normals (divided by sqrt(chi2/df) for t).
Matrix sample_copula(const ResolvedCopula& copula, Index n, std::uint64_t seed);

/// Column-wise ranks / (n+1), ties counted with <= (max rank).
Matrix pseudo_obs(const Matrix& y);

/// Inverse Rosenblatt transform of points in [0,1)^d. Only Clayton and
/// Gaussian are available; other families raise Unsupported.
Matrix rosenblatt_inverse(const ResolvedCopula& copula, const Matrix& v);

bool supports_rosenblatt(CopulaFamily family);

/// Maps into the open unit interval, guarding against exp/Phi saturation.
double clamp_open_unit(double u);

}  // namespace agmmn
