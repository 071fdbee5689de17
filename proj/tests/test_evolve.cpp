#include <doctest.h>

#include <cmath>

#include "ultrawalk/evolve.hpp"

using namespace ultrawalk;

namespace {

WalkState point(std::int64_t x0, Vec2c ic, Flavor f, int L) {
    return init_point(x0, ic, f, open_lattice(L), Boundary::open);
}

std::int64_t peak_site(const PdfSnapshot& p) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < p.rho.size(); ++i) {
        if (p.rho[i] > p.rho[best]) best = i;
    }
    return std::abs(p.x_min + static_cast<std::int64_t>(best) - p.x0);
}

} // namespace

TEST_CASE("truncation level and lattice size") {
    CHECK(open_truncation_level(4096) == 13);
    CHECK(open_truncation_level(4097) == 14);
    CHECK(open_truncation_level(1) == 2);
    const auto lat = open_lattice(13);
    CHECK(lat.x_min == -8191);
    CHECK(lat.x_max == 8191);
    CHECK(lat.size() >= 2 * (4096 + 1) + 1);
}

TEST_CASE("init_point") {
    const Lattice lat{-8, 8};
    const auto s = init_point(0, {1.0, 0.0}, Flavor::stochastic, lat, Boundary::open);
    CHECK(s.at(0).up == 1.0);
    CHECK(total_norm(s) == 1.0);
    CHECK(s.t == 0);
    CHECK(s.absorbed_left == 0.0);

    const double r = std::sqrt(0.5);
    const auto q = init_point(0, {r, Cplx(0, r)}, Flavor::unitary, lat, Boundary::open);
    CHECK(total_norm(q) == doctest::Approx(1.0).epsilon(1e-15));

    const auto w = init_point(8, {0.5, 0.5}, Flavor::stochastic, {0, 16}, Boundary::absorbing);
    CHECK(w.at(8).up == 0.5);

    CHECK_THROWS_AS(init_point(0, {0.6, 0.6}, Flavor::stochastic, lat, Boundary::open), ConfigError);
    CHECK_THROWS_AS(init_point(0, {1.0, 1.0}, Flavor::unitary, lat, Boundary::open), ConfigError);
    CHECK_THROWS_AS(init_point(0, {Cplx(0, 1), 0.0}, Flavor::stochastic, lat, Boundary::open), ConfigError);
    CHECK_THROWS_AS(init_point(16, {0.5, 0.5}, Flavor::stochastic, {0, 16}, Boundary::absorbing), ConfigError);
    CHECK_THROWS_AS(init_point(20, {0.5, 0.5}, Flavor::stochastic, lat, Boundary::open), ConfigError);
}

TEST_CASE("single steps against hand computation") {
    SUBCASE("stochastic eta = 0.3") {
        const auto h = CoinHierarchy::classical(1.0, 0.3);
        const auto s = step(point(0, {1.0, 0.0}, Flavor::stochastic, 3), h, 3);
        CHECK(s.at(1).up.real() == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(s.at(-1).down.real() == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(s.at(1).down == 0.0);
        CHECK(s.at(-1).up == 0.0);
        CHECK(total_norm(s) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.t == 1);
    }
    SUBCASE("transmissive unitary coin") {
        const auto h = CoinHierarchy::quantum(1.0, kPi / 2);
        const auto s = step(point(0, {1.0, 0.0}, Flavor::unitary, 3), h, 3);
        CHECK(std::abs(s.at(1).up - 1.0) < 1e-15);
        CHECK(std::abs(s.at(-1).down) < 1e-15);
    }
    SUBCASE("reflective unitary limit") {
        // The origin sits at level L = 3, so eta = (pi/4) 1e-9 there.
        const auto h = CoinHierarchy::quantum(1e-3);
        const auto s = step(point(0, {1.0, 0.0}, Flavor::unitary, 3), h, 3);
        CHECK(std::abs(s.at(-1).down - 1.0) < 1e-9);
        CHECK(std::abs(s.at(1).up) < 1e-8);
    }
    SUBCASE("coin is applied at the source site") {
        // Walker at x = 1 (level 0) versus x = 2 (level 1) on an inhomogeneous field.
        const auto h = CoinHierarchy::classical(0.5, 0.4);
        const auto s1 = step(point(1, {1.0, 0.0}, Flavor::stochastic, 4), h, 4);
        CHECK(s1.at(2).up.real() == doctest::Approx(0.4));
        const auto s2 = step(point(2, {1.0, 0.0}, Flavor::stochastic, 4), h, 4);
        CHECK(s2.at(3).up.real() == doctest::Approx(0.2));
        CHECK(s2.at(1).down.real() == doctest::Approx(0.8));
    }
}

TEST_CASE("open lattice overflow is reported") {
    const auto h = CoinHierarchy::classical(0.5);
    CHECK_THROWS_AS(evolve(point(0, {0.5, 0.5}, Flavor::stochastic, 2), h, 2, 10, {10}), LatticeError);
    CHECK_THROWS_WITH(evolve(point(0, {0.5, 0.5}, Flavor::stochastic, 2), h, 2, 10, {10}),
                      doctest::Contains("lattice too small"));
    CHECK_NOTHROW(evolve(point(0, {0.5, 0.5}, Flavor::stochastic, 2), h, 2, 2, {2}));
}

TEST_CASE("evolve sampling") {
    const auto h = CoinHierarchy::quantum(0.5);
    const auto s = point(0, default_ic(Flavor::unitary), Flavor::unitary, 4);
    const auto only0 = evolve(s, h, 4, 0, {0});
    REQUIRE(only0.size() == 1);
    CHECK(only0[0].t == 0);
    CHECK(only0[0].rho[static_cast<std::size_t>(-only0[0].x_min)] == doctest::Approx(1.0));
    CHECK(only0[0].msd == 0.0);

    const auto snaps = evolve(s, h, 4, 8, {8, 2, 4, 4});
    REQUIRE(snaps.size() == 3);
    CHECK(snaps[0].t == 2);
    CHECK(snaps[2].t == 8);
    CHECK_THROWS_AS(evolve(s, h, 4, 8, {9}), ConfigError);
    CHECK_THROWS_AS(evolve(s, CoinHierarchy::classical(0.5), 4, 8, {8}), ConfigError);
}

TEST_CASE("norm is conserved at every step") {
    for (double eps : {0.3, 0.5, 1.0}) {
        for (Flavor f : {Flavor::stochastic, Flavor::unitary}) {
            const auto h = f == Flavor::stochastic ? CoinHierarchy::classical(eps) : CoinHierarchy::quantum(eps);
            const double tol = f == Flavor::stochastic ? 1e-12 : 1e-10;
            const int L = open_truncation_level(2000);
            auto s = point(0, default_ic(f), f, L);
            const Evolver ev(h, L, s.lattice, Boundary::open);
            double worst = 0.0;
            for (int t = 0; t < 2000; ++t) {
                ev.advance(s);
                worst = std::max(worst, std::abs(total_norm(s) - 1.0));
            }
            CHECK(worst < tol);
            for (const auto& v : s.amplitudes) {
                if (f == Flavor::stochastic) {
                    CHECK(v.up.real() >= 0.0);
                    CHECK(v.down.real() >= 0.0);
                }
            }
        }
    }
}

TEST_CASE("mirror symmetry of the density") {
    SUBCASE("classical") {
        const auto h = CoinHierarchy::classical(0.3);
        const auto snaps = evolve(point(0, {0.5, 0.5}, Flavor::stochastic, 10), h, 10, 700, {700});
        const auto& p = snaps[0];
        const auto c = static_cast<std::size_t>(-p.x_min);
        for (std::size_t d = 1; d <= 700; ++d) CHECK(std::abs(p.rho[c + d] - p.rho[c - d]) < 1e-10);
        CHECK(std::abs(p.mean) < 1e-10);
    }
    SUBCASE("quantum") {
        const auto h = CoinHierarchy::quantum(0.6);
        const auto snaps = evolve(point(0, default_ic(Flavor::unitary), Flavor::unitary, 10), h, 10, 700, {700});
        const auto& p = snaps[0];
        const auto c = static_cast<std::size_t>(-p.x_min);
        for (std::size_t d = 1; d <= 700; ++d) CHECK(std::abs(p.rho[c + d] - p.rho[c - d]) < 1e-8);
    }
}

TEST_CASE("densities stay in range") {
    const auto h = CoinHierarchy::quantum(0.4);
    const auto snaps = evolve(point(0, default_ic(Flavor::unitary), Flavor::unitary, 9), h, 9, 256, {64, 256});
    for (const auto& p : snaps) {
        double sum = 0.0;
        for (double r : p.rho) {
            CHECK(r >= 0.0);
            sum += r;
        }
        CHECK(sum <= 1.0 + 1e-10);
        CHECK(p.norm == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("homogeneous quantum walk front moves at a fixed pseudo-velocity") {
    const auto h = CoinHierarchy::quantum(1.0);
    const int L = open_truncation_level(4096);
    const auto snaps = evolve(point(0, default_ic(Flavor::unitary), Flavor::unitary, L), h, L, 4096,
                              {256, 512, 1024, 2048, 4096});
    const double v0 = static_cast<double>(peak_site(snaps[0])) / 256.0;
    for (const auto& p : snaps) {
        const double v = static_cast<double>(peak_site(p)) / static_cast<double>(p.t);
        CHECK(std::abs(v / v0 - 1.0) < 0.02);
    }
    // Hadamard-type walk: the peak sits near t / sqrt(2).
    CHECK(v0 == doctest::Approx(std::sqrt(0.5)).epsilon(0.03));
}

TEST_CASE("absorbing walls") {
    SUBCASE("classical l = 3 is absorbed with certainty") {
        const auto h = CoinHierarchy::classical(0.5);
        const auto r = run_absorbing(3, h, {0.5, 0.5}, 1000000, 1e-6);
        CHECK(r.converged);
        CHECK(r.cumulative_left.back() + r.cumulative_right.back() == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("mirror symmetric totals for a symmetric start") {
        for (double eps : {0.2, 0.5, 0.9}) {
            const auto h = CoinHierarchy::classical(eps);
            const auto r = run_absorbing(5, h, {0.5, 0.5}, 200000, 1e-12, 1);
            for (std::size_t i = 0; i < r.times.size(); ++i)
                CHECK(std::abs(r.cumulative_left[i] - r.cumulative_right[i]) < 1e-10);
        }
    }
    SUBCASE("records are monotone and bounded") {
        for (Flavor f : {Flavor::stochastic, Flavor::unitary}) {
            const auto h = f == Flavor::stochastic ? CoinHierarchy::classical(0.4) : CoinHierarchy::quantum(0.7);
            const auto r = run_absorbing(4, h, default_ic(f), 100000, 1e-9, 1);
            REQUIRE(r.times.size() > 2);
            CHECK(r.times.front() == 0);
            for (std::size_t i = 1; i < r.times.size(); ++i) {
                CHECK(r.cumulative_left[i] >= r.cumulative_left[i - 1]);
                CHECK(r.cumulative_right[i] >= r.cumulative_right[i - 1]);
                CHECK(r.cumulative_left[i] + r.cumulative_right[i] <= 1.0 + 1e-10);
                CHECK(std::abs(r.cumulative_left[i] + r.cumulative_right[i] + r.interior[i] - 1.0) < 1e-10);
            }
        }
    }
    SUBCASE("quantum l = 4 total absorption grows toward one") {
        const auto h = CoinHierarchy::quantum(0.7);
        double prev = 0.0;
        for (std::int64_t t : {100, 1000, 10000, 100000}) {
            const auto r = run_absorbing(4, h, default_ic(Flavor::unitary), t, 1e-14);
            const double total = r.cumulative_left.back() + r.cumulative_right.back();
            CHECK(total >= prev);
            prev = total;
        }
        CHECK(prev > 0.9999);
    }
    SUBCASE("unconverged runs are flagged") {
        const auto r = run_absorbing(5, CoinHierarchy::classical(0.3), {0.5, 0.5}, 10, 1e-12);
        CHECK_FALSE(r.converged);
        CHECK(r.times.back() == 10);
    }
    CHECK_THROWS_AS(run_absorbing(1, CoinHierarchy::classical(0.3), {0.5, 0.5}, 10, 1e-6), ConfigError);
    CHECK_THROWS_AS(run_absorbing(3, CoinHierarchy::classical(0.3), {0.5, 0.5}, 10, 0.0), ConfigError);
}
