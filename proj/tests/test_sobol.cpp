#include <doctest.h>

#include "agmmn/sampling.hpp"
#include "agmmn/sobol.hpp"

#include <cmath>
#include <set>

using namespace agmmn;

namespace {

// Every elementary interval of volume 2^-k with sides 2^-a x 2^-(k-a)
// contains exactly one of the 2^k points.
bool elementary_intervals_ok(const std::vector<std::uint32_t>& lattice, int k) {
    const std::size_t n = std::size_t{1} << k;
    for (int a = 0; a <= k; ++a) {
        std::vector<int> hits(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t x = lattice[2 * i];
            const std::uint32_t y = lattice[2 * i + 1];
            const std::size_t cx = a == 0 ? 0 : x >> (32 - a);
            const std::size_t cy = k - a == 0 ? 0 : y >> (32 - (k - a));
            ++hits[(cx << (k - a)) | cy];
        }
        for (int h : hits) {
            if (h != 1) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("direction-number parser") {
    const auto rows = parse_direction_numbers("d s a m_i\n2 1 0 1\n3 2 1 1 3\n");
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].degree == 2);
    CHECK(rows[1].initial == std::vector<std::uint32_t>{1, 3});
    CHECK_THROWS(parse_direction_numbers("d s a m_i\n2 1 0 2\n"));     // even m
    CHECK_THROWS(parse_direction_numbers("d s a m_i\n2 2 0 1\n"));     // missing m
    CHECK_THROWS(parse_direction_numbers("d s a m_i\n3 1 0 1\n"));     // wrong first dimension
    CHECK(DirectionTable::builtin().max_dim() == 1000);
}

TEST_CASE("unshifted one-dimensional prefix") {
    SobolStream s(1);
    const Matrix p = sobol_points(s, 8);
    const std::vector<double> expected{0.5, 0.75, 0.25, 0.375, 0.875, 0.625, 0.125, 0.1875};
    for (Index i = 0; i < 8; ++i) CHECK(p(i, 0) == expected[static_cast<std::size_t>(i)]);
    CHECK(s.cursor() == 9);
}

TEST_CASE("agrees with an independent Joe-Kuo implementation") {
    // Unscrambled Sobol' points from scipy.stats.qmc (Gray-code order).
    SobolStream s(6);
    const Matrix p = s.points(1, 8);
    const double ref[8][6] = {{0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
                              {0.75, 0.25, 0.25, 0.25, 0.75, 0.75},
                              {0.25, 0.75, 0.75, 0.75, 0.25, 0.25},
                              {0.375, 0.375, 0.625, 0.875, 0.375, 0.125},
                              {0.875, 0.875, 0.125, 0.375, 0.875, 0.625},
                              {0.625, 0.125, 0.875, 0.625, 0.625, 0.875},
                              {0.125, 0.625, 0.375, 0.125, 0.125, 0.375},
                              {0.1875, 0.3125, 0.9375, 0.4375, 0.5625, 0.3125}};
    for (Index i = 0; i < 8; ++i)
        for (Index j = 0; j < 6; ++j) CHECK(p(i, j) == ref[i][j]);

    const SobolStream wide(1000);
    const Matrix q = wide.points(999, 1);
    const std::vector<double> tail{0.4755859375, 0.5400390625, 0.0341796875, 0.4833984375, 0.6376953125};
    for (Index j = 0; j < 5; ++j) CHECK(q(0, 995 + j) == tail[static_cast<std::size_t>(j)]);
    const Matrix r = wide.points(100, 1);
    CHECK(r(0, 999) == 0.9140625);

    const SobolStream three(3);
    const Matrix far = three.points(1000000, 1);
    CHECK(far(0, 0) == 0.026474952697753906);
    CHECK(far(0, 1) == 0.3119192123413086);
    CHECK(far(0, 2) == 0.8279962539672852);
    CHECK(three.points(12345, 1)(0, 2) == 0.16033935546875);
}

TEST_CASE("index-addressable generation equals sequential generation") {
    SobolStream s = SobolStream::shifted(5, 3);
    const Matrix all = s.points(1, 300);
    CHECK(s.points(117, 50) == all.middleRows(116, 50));
    SobolStream seq = SobolStream::shifted(5, 3);
    const Matrix first = seq.next(100);
    const Matrix second = seq.next(200);
    CHECK(first == all.topRows(100));
    CHECK(second == all.bottomRows(200));
}

TEST_CASE("shifted points stay in [0,1) and are marginally equidistributed") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const SobolStream s = SobolStream::shifted(4, seed);
        const Matrix p = s.points(0, 4096);
        CHECK((p.array() >= 0.0).all());
        CHECK((p.array() < 1.0).all());
        for (Index j = 0; j < 4; ++j) {
            std::vector<double> col(p.col(j).data(), p.col(j).data() + p.rows());
            std::sort(col.begin(), col.end());
            double ks = 0.0;
            for (std::size_t i = 0; i < col.size(); ++i) {
                ks = std::max({ks, (i + 1) / 4096.0 - col[i], col[i] - i / 4096.0});
            }
            CHECK(ks < std::exp2(-10));
        }
    }
    // the unshifted prefix hits each cell {j 2^-k} exactly once
    const Matrix p = SobolStream(3).points(0, 1024);
    for (Index j = 0; j < 3; ++j) {
        std::set<double> cells(p.col(j).data(), p.col(j).data() + 1024);
        CHECK(cells.size() == 1024);
        CHECK(*cells.rbegin() == 1023.0 / 1024.0);
    }
}

TEST_CASE("elementary intervals in two dimensions, with and without shift") {
    for (int k = 1; k <= 8; ++k) {
        const std::size_t n = std::size_t{1} << k;
        CHECK(elementary_intervals_ok(SobolStream(2).lattice(0, static_cast<Index>(n)), k));
        for (std::uint64_t seed : {5u, 6u}) {
            CHECK(elementary_intervals_ok(SobolStream::shifted(2, seed).lattice(0, static_cast<Index>(n)), k));
        }
    }
}

TEST_CASE("masks and limits") {
    CHECK(SobolStream(3).mask() == std::vector<std::uint32_t>(3, 0));
    CHECK(SobolStream::shifted(3, 1, 0).mask() != SobolStream::shifted(3, 1, 1).mask());
    CHECK(SobolStream::shifted(3, 1, 0).mask() == SobolStream::shifted(3, 1, 0).mask());
    CHECK_THROWS_AS(SobolStream(1001), DimensionError);
    CHECK_THROWS_AS(SobolStream(0), DimensionError);
    CHECK_THROWS(SobolStream(1).points(std::uint64_t{1} << 32, 1));
}

TEST_CASE("tail threshold and counting") {
    // 1 - (1000/5120)^(1/10) evaluated with 30-digit arithmetic
    CHECK(tail_threshold(10, 1000, 5120) == doctest::Approx(0.150676767682876357).epsilon(1e-14));
    const auto res = tail_count_study(10, 11, 1000, 5, 3);
    REQUIRE(res.size() == 2);
    CHECK(res[0].n_gen == 5120);
    CHECK(res[1].n_gen == 10240);
    for (const auto& r : res) {
        CHECK(r.counts.size() == 5);
        for (auto c : r.counts) CHECK(c <= r.n_gen);
    }
    // counting agrees with an explicit pass over the points
    const SobolStream s = SobolStream::shifted(10, 3, (std::uint64_t{10} << 32) | 2);
    const Matrix p = s.points(1, 5120);
    std::uint64_t count = 0;
    for (Index i = 0; i < p.rows(); ++i) count += (p.row(i).array() > res[0].threshold).all() ? 1 : 0;
    CHECK(res[0].counts[2] == count);
}

TEST_CASE("iid control centres on n_tail") {
    const auto res = tail_count_study(10, 10, 1000, 500, 8, TailPointSet::Iid);
    CHECK(std::abs(res[0].mean() - 1000.0) < 3.0 * std::sqrt(1000.0) / std::sqrt(500.0));
}

TEST_CASE("quasi-random sampling from a model") {
    MlpArchitecture a;
    a.input_dim = 1;
    a.hidden_sizes = {1};
    a.output_dim = 1;
    MlpModel m(a);
    m.layers()[0].weights(0, 0) = 1.0;  // increasing in z
    m.layers()[0].bias(0) = 10.0;
    m.layers()[1].weights(0, 0) = 1.0;
    SobolStream s(1);
    const Matrix u = qrs_from_model(m, s, 3);
    // points 0.5, 0.75, 0.25 -> ranks 2, 3, 1
    CHECK(u(0, 0) == 2.0 / 4.0);
    CHECK(u(1, 0) == 3.0 / 4.0);
    CHECK(u(2, 0) == 1.0 / 4.0);

    a.input_dim = 2;
    a.output_dim = 3;
    a.hidden_sizes = {2};
    MlpModel w(a);
    w.layers()[0].weights = Matrix::Identity(2, 2);
    w.layers()[0].bias.setConstant(10.0);
    w.layers()[1].weights << 0.1, 0.0, 0.0, 0.1, 0.1, 0.1;
    w.layers()[1].bias << -1.0, -1.0, -2.0;
    SobolStream s1 = SobolStream::shifted(2, 9);
    SobolStream s2 = SobolStream::shifted(2, 9);
    const Matrix q1 = qrs_from_model(w, s1, 64);
    CHECK(q1 == qrs_from_model(w, s2, 64));
    for (Index j = 0; j < 3; ++j) {
        std::vector<double> col(q1.col(j).data(), q1.col(j).data() + 64);
        std::sort(col.begin(), col.end());
        for (std::size_t i = 0; i < 64; ++i) CHECK(col[i] == (i + 1) / 65.0);
    }
    SobolStream wrong(3);
    CHECK_THROWS_AS(qrs_from_model(w, wrong, 4), DimensionError);
    CHECK(prs_from_model(w, 10, 1) == prs_from_model(w, 10, 1));
    CHECK(std::isfinite(normal_prior_from_uniform(Matrix::Zero(1, 1))(0, 0)));
}
