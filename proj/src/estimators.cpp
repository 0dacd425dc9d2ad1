#include "agmmn/estimators.hpp"

#include "agmmn/distributions.hpp"
#include "agmmn/parallel.hpp"
#include "agmmn/random.hpp"
#include "agmmn/sampling.hpp"
#include "agmmn/sobol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace agmmn {

namespace {

double pick(const std::vector<double>& v, Index j) {
    return v.size() == 1 ? v.front() : v[static_cast<std::size_t>(j)];
}

void check_length(const std::vector<double>& v, Index d, const char* name) {
    if (v.size() != 1 && static_cast<Index>(v.size()) != d) {
        throw std::invalid_argument(std::string("margin parameter '") + name + "' needs 1 or d entries");
    }
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("confidence level must lie in (0,1)");
}

Vector row_sums(const Matrix& x) { return x.rowwise().sum(); }

// Rows with S_i strictly above the empirical alpha-quantile of S.
std::vector<Index> tail_rows(const Vector& s, double alpha) {
    std::vector<double> sorted(s.data(), s.data() + s.size());
    std::sort(sorted.begin(), sorted.end());
    const double threshold = empirical_quantile_sorted(sorted, alpha);
    std::vector<Index> rows;
    for (Index i = 0; i < s.size(); ++i) {
        if (s(i) > threshold) rows.push_back(i);
    }
    if (rows.empty()) throw DegenerateData("no losses exceed the empirical quantile");
    return rows;
}

double sample_sd(const std::vector<double>& x) {
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(x.size() - 1));
}

struct Ols {
    double slope;
    double intercept;
};

Ols ols(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) throw DegenerateData("regression needs at least two distinct sample sizes");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

}  // namespace

MarginSpec MarginSpec::normal() { return MarginSpec{}; }

MarginSpec MarginSpec::log_normal(std::vector<double> spot, std::vector<double> sigma, double rate, double maturity) {
    MarginSpec m;
    m.kind = Kind::LogNormal;
    m.spot = std::move(spot);
    m.sigma = std::move(sigma);
    m.rate = rate;
    m.maturity = maturity;
    return m;
}

MarginSpec MarginSpec::scaled_t(std::vector<double> df, std::vector<double> loc, std::vector<double> scale) {
    MarginSpec m;
    m.kind = Kind::ScaledT;
    m.df = std::move(df);
    m.loc = std::move(loc);
    m.scale = std::move(scale);
    return m;
}

void MarginSpec::validate(Index d) const {
    switch (kind) {
        case Kind::Normal: break;
        case Kind::LogNormal:
            check_length(spot, d, "spot");
            check_length(sigma, d, "sigma");
            for (double s : spot) {
                if (!(s > 0.0)) throw std::invalid_argument("log-normal spot prices must be positive");
            }
            for (double s : sigma) {
                if (!(s >= 0.0)) throw std::invalid_argument("log-normal volatilities must be >= 0");
            }
            if (!(maturity >= 0.0) || !std::isfinite(rate)) throw std::invalid_argument("invalid rate or maturity");
            break;
        case Kind::ScaledT:
            check_length(df, d, "df");
            check_length(loc, d, "loc");
            check_length(scale, d, "scale");
            for (double v : df) {
                if (!(v > 0.0)) throw std::invalid_argument("t margins need positive degrees of freedom");
            }
            for (double v : scale) {
                if (!(v > 0.0)) throw std::invalid_argument("t margins need positive scales");
            }
            break;
    }
}

double MarginSpec::quantile(Index j, double u) const {
    switch (kind) {
        case Kind::Normal: return normal_quantile(u);
        case Kind::LogNormal: {
            const double s = pick(sigma, j);
            return pick(spot, j) *
                   std::exp((rate - 0.5 * s * s) * maturity + s * std::sqrt(maturity) * normal_quantile(u));
        }
        case Kind::ScaledT: return pick(loc, j) + pick(scale, j) * student_t_quantile(u, pick(df, j));
    }
    return 0.0;
}

std::string to_string(MarginSpec::Kind kind) {
    switch (kind) {
        case MarginSpec::Kind::Normal: return "normal";
        case MarginSpec::Kind::LogNormal: return "lognormal";
        case MarginSpec::Kind::ScaledT: return "scaled-t";
    }
    return "unknown";
}

MarginSpec::Kind parse_margin_kind(std::string_view name) {
    if (name == "normal") return MarginSpec::Kind::Normal;
    if (name == "lognormal") return MarginSpec::Kind::LogNormal;
    if (name == "scaled-t") return MarginSpec::Kind::ScaledT;
    throw std::invalid_argument("unknown margin kind '" + std::string(name) + "'");
}

std::vector<double> equidistant(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    std::vector<double> out(n, lo);
    for (std::size_t i = 1; i < n; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

Matrix apply_margins(const Matrix& u, const MarginSpec& margins) {
    margins.validate(u.cols());
    Matrix x(u.rows(), u.cols());
    for (Index j = 0; j < u.cols(); ++j) {
        for (Index i = 0; i < u.rows(); ++i) x(i, j) = margins.quantile(j, u(i, j));
    }
    return x;
}

double psi1_es(const Matrix& u, const MarginSpec& margins, double alpha) {
    check_alpha(alpha);
    if (u.rows() < 1) throw DimensionError("psi1_es: empty sample");
    const Vector s = row_sums(apply_margins(u, margins));
    const auto rows = tail_rows(s, alpha);
    double acc = 0.0;
    for (Index i : rows) acc += s(i);
    return acc / static_cast<double>(rows.size());
}

double psi2_alloc(const Matrix& u, const MarginSpec& margins, double alpha, Index component) {
    check_alpha(alpha);
    if (u.rows() < 1) throw DimensionError("psi2_alloc: empty sample");
    if (component < 0 || component >= u.cols()) throw DimensionError("psi2_alloc: component out of range");
    const Matrix x = apply_margins(u, margins);
    const auto rows = tail_rows(row_sums(x), alpha);
    double acc = 0.0;
    for (Index i : rows) acc += x(i, component);
    return acc / static_cast<double>(rows.size());
}

double basket_call_payoff(std::span<const double> terminal_prices, double strike, double rate, double maturity) {
    if (terminal_prices.empty()) throw DimensionError("basket_call_payoff: empty basket");
    const double mean =
        std::accumulate(terminal_prices.begin(), terminal_prices.end(), 0.0) / static_cast<double>(terminal_prices.size());
    return std::exp(-rate * maturity) * std::max(mean - strike, 0.0);
}

double psi3_basket(const Matrix& u, const MarginSpec& margins, double strike) {
    if (margins.kind != MarginSpec::Kind::LogNormal) throw std::invalid_argument("psi3_basket needs log-normal margins");
    if (!(strike > 0.0)) throw std::invalid_argument("strike must be positive");
    if (u.rows() < 1) throw DimensionError("psi3_basket: empty sample");
    const Matrix prices = apply_margins(u, margins);
    std::vector<double> row(static_cast<std::size_t>(u.cols()));
    double acc = 0.0;
    for (Index i = 0; i < prices.rows(); ++i) {
        for (Index j = 0; j < prices.cols(); ++j) row[static_cast<std::size_t>(j)] = prices(i, j);
        acc += basket_call_payoff(row, strike, margins.rate, margins.maturity);
    }
    return acc / static_cast<double>(u.rows());
}

std::string to_string(Functional f) {
    switch (f) {
        case Functional::Psi1: return "psi1";
        case Functional::Psi2: return "psi2";
        case Functional::Psi3: return "psi3";
    }
    return "unknown";
}

std::string to_string(Generator g) {
    switch (g) {
        case Generator::CopulaPrs: return "copula-prs";
        case Generator::CopulaQrs: return "copula-qrs";
        case Generator::ModelPrs: return "model-prs";
        case Generator::ModelQrs: return "model-qrs";
    }
    return "unknown";
}

Functional parse_functional(std::string_view name) {
    if (name == "psi1") return Functional::Psi1;
    if (name == "psi2") return Functional::Psi2;
    if (name == "psi3") return Functional::Psi3;
    throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
}

Generator parse_generator(std::string_view name) {
    if (name == "copula-prs") return Generator::CopulaPrs;
    if (name == "copula-qrs") return Generator::CopulaQrs;
    if (name == "model-prs") return Generator::ModelPrs;
    if (name == "model-qrs") return Generator::ModelQrs;
    throw std::invalid_argument("unknown generator '" + std::string(name) + "'");
}

double evaluate_functional(const FunctionalSpec& f, const Matrix& u) {
    switch (f.kind) {
        case Functional::Psi1: return psi1_es(u, f.margins, f.alpha);
        case Functional::Psi2: return psi2_alloc(u, f.margins, f.alpha, f.component);
        case Functional::Psi3: return psi3_basket(u, f.margins, f.strike);
    }
    return 0.0;
}

std::vector<Index> log2_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("log2_grid: need lo <= hi and step > 0");
    std::vector<Index> grid;
    const auto count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int k = 0; k <= count; ++k) grid.push_back(static_cast<Index>(std::llround(std::exp2(lo + k * step))));
    return grid;
}

EstimatorRun run_estimator(const EstimatorSpec& spec) {
    if (spec.replications < 2) throw std::invalid_argument("run_estimator: B >= 2 replications are needed for a standard deviation");
    if (spec.grid.empty()) throw std::invalid_argument("run_estimator: empty sample-size grid");
    for (Index n : spec.grid) {
        if (n < 1) throw std::invalid_argument("run_estimator: sample sizes must be >= 1");
    }
    const bool copula_gen = spec.generator == Generator::CopulaPrs || spec.generator == Generator::CopulaQrs;
    if (copula_gen && !spec.copula) throw std::invalid_argument("run_estimator: copula generator without a copula");
    if (!copula_gen && spec.model == nullptr) throw std::invalid_argument("run_estimator: model generator without a model");
    if (spec.generator == Generator::CopulaQrs && !supports_rosenblatt(spec.copula->family)) {
        throw Unsupported("copula-qrs is not available for the " + to_string(spec.copula->family) + " copula");
    }
    const Index d = copula_gen ? spec.copula->dim : spec.model->architecture().output_dim;
    spec.functional.margins.validate(d);

    EstimatorRun run;
    run.functional = spec.functional.kind;
    run.generator = spec.generator;
    run.grid = spec.grid;
    run.replications = spec.replications;
    const std::size_t n_grid = spec.grid.size();
    const auto reps = static_cast<std::size_t>(spec.replications);
    run.estimates.assign(n_grid, std::vector<double>(reps, 0.0));

    parallel_for(n_grid * reps, spec.threads, [&](std::size_t job) {
        const std::size_t g = job / reps;
        const std::size_t b = job % reps;
        const Index n = spec.grid[g];
        const std::uint64_t key = (static_cast<std::uint64_t>(g) << 32) | b;
        Matrix u;
        switch (spec.generator) {
            case Generator::CopulaPrs:
                u = sample_copula(*spec.copula, n, derive_seed(spec.seed, "copula-prs", key));
                break;
            case Generator::CopulaQrs: {
                SobolStream stream = SobolStream::shifted(d, spec.seed, key);
                u = qrs_from_copula(*spec.copula, stream, n);
                break;
            }
            case Generator::ModelPrs:
                u = prs_from_model(*spec.model, n, spec.seed, key);
                break;
            case Generator::ModelQrs: {
                SobolStream stream = SobolStream::shifted(spec.model->architecture().input_dim, spec.seed, key);
                u = qrs_from_model(*spec.model, stream, n);
                break;
            }
        }
        run.estimates[g][b] = evaluate_functional(spec.functional, u);
    });

    for (const auto& row : run.estimates) {
        run.means.push_back(std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size()));
        run.sds.push_back(sample_sd(row));
    }
    return run;
}

ConvergenceFit convergence_fit(std::span<const Index> grid, std::span<const double> sds) {
    if (grid.size() != sds.size()) throw DimensionError("convergence_fit: grid and sd lengths differ");
    ConvergenceFit fit;
    std::vector<double> lx, ly, rx, ry;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(sds[i] > 0.0)) {
            fit.warnings.push_back("sd at n=" + std::to_string(grid[i]) + " is not positive; excluded from the fit");
            continue;
        }
        lx.push_back(std::log2(static_cast<double>(grid[i])));
        ly.push_back(std::log2(sds[i]));
        rx.push_back(static_cast<double>(grid[i]));
        ry.push_back(sds[i]);
    }
    if (lx.size() < 3) throw DegenerateData("convergence rate needs at least three positive standard deviations");
    const Ols log_fit = ols(lx, ly);
    const Ols raw_fit = ols(rx, ry);
    fit.slope = log_fit.slope;
    fit.intercept = log_fit.intercept;
    fit.raw_slope = raw_fit.slope;
    fit.raw_intercept = raw_fit.intercept;
    fit.points_used = lx.size();
    return fit;
}

double convergence_rate(const EstimatorRun& run) { return convergence_fit(run.grid, run.sds).slope; }

double rel_bias(double estimate, double reference) {
    if (reference == 0.0) throw std::invalid_argument("rel_bias: zero reference value");
    return std::abs(estimate - reference) / std::abs(reference);
}

double vrf(double variance_other, double variance_agmmn) {
    if (!(variance_agmmn > 0.0) || !(variance_other > 0.0)) throw std::invalid_argument("vrf: variances must be positive");
    return variance_other / variance_agmmn;
}

namespace {

double corner_sum(const Matrix& a, const Matrix& b) {
    double total = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index k = 0; k < b.rows(); ++k) {
            double prod = 1.0;
            for (Index j = 0; j < a.cols(); ++j) prod *= 1.0 - std::max(a(i, j), b(k, j));
            total += prod;
        }
    }
    return total;
}

}  // namespace

double cvm_integral(const Matrix& u, const Matrix& v) {
    if (u.rows() < 1 || v.rows() < 1) throw DimensionError("cvm_integral: empty sample");
    if (u.cols() != v.cols()) throw DimensionError("cvm_integral: samples differ in dimension");
    const auto n = static_cast<double>(u.rows());
    const auto m = static_cast<double>(v.rows());
    const double cross = corner_sum(u, v) / (n * m);
    const double value = (corner_sum(u, u) / (n * n) - cross) + (corner_sum(v, v) / (m * m) - cross);
    return std::max(value, 0.0);
}

double cvm_statistic(const Matrix& u, const Matrix& v) {
    const double scale = std::sqrt(1.0 / static_cast<double>(u.rows()) + 1.0 / static_cast<double>(v.rows()));
    return cvm_integral(u, v) / scale;
}

double acvm(const Matrix& u_dat, const std::function<Matrix(int)>& sampler, int n_rep) {
    if (n_rep < 1) throw std::invalid_argument("acvm: n_rep must be >= 1");
    double total = 0.0;
    for (int r = 0; r < n_rep; ++r) total += cvm_statistic(u_dat, sampler(r));
    return total / n_rep;
}

}  // namespace agmmn
