#include "agmmn/sobol.hpp"

#include "agmmn/random.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace agmmn {

namespace detail {
extern const char* const kJoeKuoDirectionText;
}

namespace {

constexpr std::uint64_t kMaxIndex = std::uint64_t{1} << 32;
constexpr double kLatticeScale = 0x1.0p-32;

std::uint64_t gray(std::uint64_t i) { return i ^ (i >> 1); }

void check_range(std::uint64_t first, Index n) {
    if (n < 0) throw std::invalid_argument("Sobol': negative point count");
    if (first > kMaxIndex || static_cast<std::uint64_t>(n) > kMaxIndex - first) {
        throw std::out_of_range("Sobol': point index beyond the 32-bit lattice");
    }
}

// Shifted lattice points first..first+n-1, handed to `emit(row, x)` one by one.
template <class Emit>
void walk(const DirectionTable& table, Index dim, const std::vector<std::uint32_t>& mask, std::uint64_t first,
          Index n, Emit&& emit) {
    std::vector<std::uint32_t> x(static_cast<std::size_t>(dim), 0);
    const std::uint64_t g = gray(first);
    for (Index j = 0; j < dim; ++j) {
        const std::uint32_t* v = table.directions(static_cast<int>(j));
        std::uint32_t acc = 0;
        for (int b = 0; b < DirectionTable::kBits; ++b) {
            if ((g >> b) & 1U) acc ^= v[b];
        }
        x[static_cast<std::size_t>(j)] = acc;
    }
    std::vector<std::uint32_t> shifted(x.size());
    for (Index r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < x.size(); ++j) shifted[j] = x[j] ^ mask[j];
        emit(r, shifted);
        if (r + 1 == n) break;
        const int c = std::countr_zero(first + static_cast<std::uint64_t>(r) + 1);
        for (Index j = 0; j < dim; ++j) x[static_cast<std::size_t>(j)] ^= table.directions(static_cast<int>(j))[c];
    }
}

}  // namespace

std::vector<DirectionEntry> parse_direction_numbers(std::string_view text) {
    std::vector<DirectionEntry> out;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (!std::isdigit(static_cast<unsigned char>(line[first]))) {
            if (out.empty()) continue;  // header
            throw std::invalid_argument("direction numbers: unexpected text on line " + std::to_string(line_no));
        }
        std::istringstream row(line);
        DirectionEntry e;
        long long a = 0;
        if (!(row >> e.dim >> e.degree >> a) || e.degree < 1 || a < 0) {
            throw std::invalid_argument("direction numbers: malformed row on line " + std::to_string(line_no));
        }
        e.coefficients = static_cast<std::uint32_t>(a);
        for (int k = 1; k <= e.degree; ++k) {
            long long m = 0;
            if (!(row >> m)) {
                throw std::invalid_argument("direction numbers: too few m_i on line " + std::to_string(line_no));
            }
            if (m < 1 || m % 2 == 0 || (k < 62 && m >= (1LL << k))) {
                throw std::invalid_argument("direction numbers: m_" + std::to_string(k) + " must be odd and < 2^" +
                                            std::to_string(k) + " (line " + std::to_string(line_no) + ")");
            }
            e.initial.push_back(static_cast<std::uint32_t>(m));
        }
        const int expected = out.empty() ? 2 : out.back().dim + 1;
        if (e.dim != expected) {
            throw std::invalid_argument("direction numbers: expected dimension " + std::to_string(expected) +
                                        " on line " + std::to_string(line_no));
        }
        out.push_back(std::move(e));
    }
    return out;
}

DirectionTable::DirectionTable(const std::vector<DirectionEntry>& entries) {
    v_.reserve(entries.size() + 1);
    std::vector<std::uint32_t> first(kBits);
    for (int k = 0; k < kBits; ++k) first[static_cast<std::size_t>(k)] = std::uint32_t{1} << (kBits - 1 - k);
    v_.push_back(std::move(first));

    for (const auto& e : entries) {
        const int s = e.degree;
        std::vector<std::uint32_t> v(kBits);
        for (int k = 0; k < kBits; ++k) {
            if (k < s) {
                v[static_cast<std::size_t>(k)] = e.initial[static_cast<std::size_t>(k)] << (kBits - 1 - k);
                continue;
            }
            std::uint32_t value = v[static_cast<std::size_t>(k - s)];
            value ^= value >> s;
            for (int i = 1; i < s; ++i) {
                if ((e.coefficients >> (s - 1 - i)) & 1U) value ^= v[static_cast<std::size_t>(k - i)];
            }
            v[static_cast<std::size_t>(k)] = value;
        }
        v_.push_back(std::move(v));
    }
}

const DirectionTable& DirectionTable::builtin() {
    static const DirectionTable table(parse_direction_numbers(detail::kJoeKuoDirectionText));
    return table;
}

SobolStream::SobolStream(Index dim, const DirectionTable& table)
    : SobolStream(dim, std::vector<std::uint32_t>(static_cast<std::size_t>(std::max<Index>(dim, 0)), 0), table) {}

SobolStream::SobolStream(Index dim, std::vector<std::uint32_t> mask, const DirectionTable& table)
    : dim_(dim), mask_(std::move(mask)), table_(&table) {
    if (dim < 1) throw DimensionError("Sobol' dimension must be >= 1");
    if (dim > table.max_dim()) {
        throw DimensionError("Sobol' dimension " + std::to_string(dim) + " exceeds the direction-number table (" +
                             std::to_string(table.max_dim()) + ")");
    }
    if (static_cast<Index>(mask_.size()) != dim) throw DimensionError("Sobol' shift mask length differs from dimension");
}

SobolStream SobolStream::shifted(Index dim, std::uint64_t seed, std::uint64_t replicate, const DirectionTable& table) {
    Rng rng = make_rng(seed, "sobol-shift", replicate);
    std::vector<std::uint32_t> mask(static_cast<std::size_t>(std::max<Index>(dim, 0)));
    for (auto& m : mask) m = static_cast<std::uint32_t>(rng() >> 32);
    return SobolStream(dim, std::move(mask), table);
}

std::vector<std::uint32_t> SobolStream::lattice(std::uint64_t first, Index n) const {
    check_range(first, n);
    std::vector<std::uint32_t> out(static_cast<std::size_t>(n * dim_));
    walk(*table_, dim_, mask_, first, n, [&](Index r, const std::vector<std::uint32_t>& x) {
        std::copy(x.begin(), x.end(), out.begin() + r * dim_);
    });
    return out;
}

Matrix SobolStream::points(std::uint64_t first, Index n) const {
    check_range(first, n);
    Matrix out(n, dim_);
    walk(*table_, dim_, mask_, first, n, [&](Index r, const std::vector<std::uint32_t>& x) {
        for (Index j = 0; j < dim_; ++j) out(r, j) = static_cast<double>(x[static_cast<std::size_t>(j)]) * kLatticeScale;
    });
    return out;
}

Matrix SobolStream::next(Index n) {
    Matrix out = points(cursor_, n);
    cursor_ += static_cast<std::uint64_t>(n);
    return out;
}

Matrix sobol_points(SobolStream& stream, Index n) {
    if (n < 1) throw std::invalid_argument("sobol_points: n must be >= 1");
    return stream.next(n);
}

double TailCountResult::mean() const {
    if (counts.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (auto c : counts) s += static_cast<double>(c);
    return s / static_cast<double>(counts.size());
}

double TailCountResult::variance() const {
    if (counts.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean();
    double s = 0.0;
    for (auto c : counts) s += (static_cast<double>(c) - m) * (static_cast<double>(c) - m);
    return s / static_cast<double>(counts.size() - 1);
}

double tail_threshold(int dim, std::uint64_t n_tail, std::uint64_t n_gen) {
    if (dim < 1 || n_gen == 0 || n_tail > n_gen) throw std::invalid_argument("tail_threshold: need d >= 1, n_tail <= n_gen");
    return 1.0 - std::pow(static_cast<double>(n_tail) / static_cast<double>(n_gen), 1.0 / dim);
}

std::vector<TailCountResult> tail_count_study(int d_min, int d_max, std::uint64_t n_tail, int replicates,
                                              std::uint64_t seed, TailPointSet point_set) {
    if (d_min < 1 || d_max < d_min) throw std::invalid_argument("tail_count_study: invalid dimension range");
    if (d_max > 30) throw std::invalid_argument("tail_count_study: n_gen = 5 * 2^d must stay below 2^32");
    if (replicates < 1) throw std::invalid_argument("tail_count_study: need at least one replicate");
    std::vector<TailCountResult> results;
    for (int d = d_min; d <= d_max; ++d) {
        TailCountResult res;
        res.dim = d;
        res.n_gen = std::uint64_t{5} << d;
        res.n_tail = n_tail;
        res.threshold = tail_threshold(d, n_tail, res.n_gen);
        // x * 2^-32 > t  <=>  x > floor(t * 2^32) for integer x.
        const double scaled = std::floor(res.threshold * 0x1.0p32);
        const auto cut = static_cast<std::uint64_t>(scaled);
        for (int b = 0; b < replicates; ++b) {
            const std::uint64_t key = (static_cast<std::uint64_t>(d) << 32) | static_cast<std::uint64_t>(b);
            std::uint64_t count = 0;
            if (point_set == TailPointSet::Sobol) {
                const SobolStream stream = SobolStream::shifted(d, seed, key);
                walk(DirectionTable::builtin(), d, stream.mask(), 1, static_cast<Index>(res.n_gen),
                     [&](Index, const std::vector<std::uint32_t>& x) {
                         for (auto xj : x) {
                             if (xj <= cut) return;
                         }
                         ++count;
                     });
            } else {
                Rng rng = make_rng(seed, "tail-iid", key);
                for (std::uint64_t i = 0; i < res.n_gen; ++i) {
                    bool inside = true;
                    for (int j = 0; j < d; ++j) {
                        // Draw every coordinate so the stream layout does not depend on outcomes.
                        const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
                        inside = inside && u > res.threshold;
                    }
                    if (inside) ++count;
                }
            }
            res.counts.push_back(count);
        }
        results.push_back(std::move(res));
    }
    return results;
}

}  // namespace agmmn
