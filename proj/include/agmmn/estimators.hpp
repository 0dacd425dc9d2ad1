#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agmmn/common.hpp"
#include "agmmn/copula.hpp"
#include "agmmn/nn.hpp"

namespace agmmn {

/// Marginal quantile functions applied to copula-scale inputs.
struct MarginSpec {
    enum class Kind { Normal, LogNormal, ScaledT };

    Kind kind = Kind::Normal;
    // log-normal: S_T = S_t exp((r - sigma^2/2) tau + sigma sqrt(tau) Phi^-1(u))
    std::vector<double> spot;
    std::vector<double> sigma;
    double rate = 0.01;
    double maturity = 1.0;
    // scaled t: loc + scale * t_df^-1(u)
    std::vector<double> df;
    std::vector<double> loc;
    std::vector<double> scale;

    static MarginSpec normal();
    static MarginSpec log_normal(std::vector<double> spot, std::vector<double> sigma, double rate, double maturity);
    static MarginSpec scaled_t(std::vector<double> df, std::vector<double> loc, std::vector<double> scale);

    /// Throws std::invalid_argument if the parameters cannot serve a
    /// d-dimensional input (vectors must have length 1 or d).
    void validate(Index d) const;

    double quantile(Index component, double u) const;
};

std::string to_string(MarginSpec::Kind kind);
MarginSpec::Kind parse_margin_kind(std::string_view name);

/// n values equally spaced on [lo, hi] (lo alone when n == 1).
std::vector<double> equidistant(double lo, double hi, std::size_t n);

/// Applies the margins row by row.
Matrix apply_margins(const Matrix& u, const MarginSpec& margins);

/// Expected shortfall of S = sum_j X_j: mean of S_i strictly above the
/// empirical alpha-quantile (inverse-ECDF convention).
double psi1_es(const Matrix& u, const MarginSpec& margins, double alpha = 0.99);

/// Mean of X_{i,component} (0-based) over the rows used by psi1_es.
double psi2_alloc(const Matrix& u, const MarginSpec& margins, double alpha = 0.99, Index component = 0);

/// Discounted basket call payoff e^{-r tau} max(mean_j S_T,j - K, 0).
double basket_call_payoff(std::span<const double> terminal_prices, double strike, double rate, double maturity);

/// Mean basket call payoff over rows; margins must be log-normal.
double psi3_basket(const Matrix& u, const MarginSpec& margins, double strike);

enum class Functional { Psi1, Psi2, Psi3 };
enum class Generator { CopulaPrs, CopulaQrs, ModelPrs, ModelQrs };

std::string to_string(Functional f);
std::string to_string(Generator g);
Functional parse_functional(std::string_view name);
Generator parse_generator(std::string_view name);

struct FunctionalSpec {
    Functional kind = Functional::Psi1;
    MarginSpec margins;
    double alpha = 0.99;
    Index component = 0;
    double strike = 1.01;
};

double evaluate_functional(const FunctionalSpec& f, const Matrix& u);

/// round(2^x) for x = lo, lo + step, ..., hi.
std::vector<Index> log2_grid(double lo, double hi, double step = 0.5);

struct EstimatorSpec {
    FunctionalSpec functional;
    Generator generator = Generator::CopulaPrs;
    std::optional<ResolvedCopula> copula;  ///< copula generators
    const MlpModel* model = nullptr;       ///< model generators
    std::vector<Index> grid;
    int replications = 25;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct EstimatorRun {
    Functional functional = Functional::Psi1;
    Generator generator = Generator::CopulaPrs;
    std::vector<Index> grid;
    int replications = 0;
    /// estimates[g][b]: grid point g, replicate b.
    std::vector<std::vector<double>> estimates;
    std::vector<double> means;
    std::vector<double> sds;  ///< sample standard deviations (B - 1)
};

/// Throws Unsupported for copula-QRS with a family lacking an inverse
/// Rosenblatt transform, std::invalid_argument for B < 2 or missing inputs.
EstimatorRun run_estimator(const EstimatorSpec& spec);

struct ConvergenceFit {
    double slope = 0.0;      ///< OLS slope of log2(sd) on log2(n)
    double intercept = 0.0;
    double raw_slope = 0.0;  ///< OLS slope of sd on n
    double raw_intercept = 0.0;
    std::size_t points_used = 0;
    std::vector<std::string> warnings;
};

/// Needs at least three positive sds; zero sds are dropped with a warning.
ConvergenceFit convergence_fit(std::span<const Index> grid, std::span<const double> sds);
double convergence_rate(const EstimatorRun& run);

double rel_bias(double estimate, double reference);
double vrf(double variance_other, double variance_agmmn);

/// Closed-form integral of (C_U - C_V)^2 over the unit cube for the empirical
/// copulas of the rows of U and V.
double cvm_integral(const Matrix& u, const Matrix& v);

/// cvm_integral / sqrt(1/n + 1/m).
double cvm_statistic(const Matrix& u, const Matrix& v);

/// Average cvm_statistic of u_dat against sampler(r), r = 0..n_rep-1.
double acvm(const Matrix& u_dat, const std::function<Matrix(int)>& sampler, int n_rep = 25);

}  // namespace agmmn
