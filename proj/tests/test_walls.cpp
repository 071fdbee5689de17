#include <doctest.h>

#include <cmath>

#include "ultrawalk/evolve.hpp"
#include "ultrawalk/walls.hpp"

using namespace ultrawalk;

TEST_CASE("closed-form wall amplitudes") {
    const auto a = classical_wall_closed_form(0.5, {1.0, 0.0});
    CHECK(a.F_left == 0.5);
    CHECK(a.F_right == 0.5);
    // A right mover in the homogeneous limit leaves through the right wall.
    const auto b = classical_wall_closed_form(1.0, {1.0, 0.0});
    CHECK(b.F_right == 1.0);
    CHECK(b.F_left == 0.0);
    for (double e = 0.05; e <= 1.0; e += 0.05) {
        for (double p = 0.0; p <= 1.0; p += 0.125) {
            const auto w = classical_wall_closed_form(e, {p, 1.0 - p});
            CHECK(w.F_left + w.F_right == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
    CHECK_THROWS_AS(classical_wall_closed_form(0.0, {1.0, 0.0}), ConfigError);
}

TEST_CASE("symmetric start splits evenly") {
    for (double e : {0.1, 0.3, 0.5, 0.8, 1.0}) {
        const auto h = CoinHierarchy::classical(e);
        for (int l : {2, 5, 12}) {
            const auto w = rg_wall_amplitudes_precise(l, h, {0.5, 0.5});
            CHECK(w.F_left == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(w.F_right == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(w.probabilistic);
        }
    }
}

TEST_CASE("absorption sums to one at every system size") {
    for (double e : {0.2, 0.3, 0.5, 0.8}) {
        const auto h = CoinHierarchy::classical(e);
        for (int l = 2; l <= 14; ++l) {
            const auto w = rg_wall_amplitudes_precise(l, h, {1.0, 0.0});
            CHECK(std::abs(w.F_left + w.F_right - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("large-l walls approach the closed form for barrier-dominated hierarchies") {
    for (double e : {0.1, 0.25, 0.4}) {
        const auto h = CoinHierarchy::classical(e);
        const auto limit = classical_wall_closed_form(e, {1.0, 0.0});
        double prev = 1.0;
        for (int l = 4; l <= 12; ++l) {
            const auto w = rg_wall_amplitudes_precise(l, h, {1.0, 0.0});
            const double d = std::abs(w.F_right - limit.F_right);
            CHECK(d < prev);
            prev = d;
        }
        CHECK(prev < 0.01);
    }
}

TEST_CASE("double and extended precision agree on small systems") {
    for (double e : {0.3, 0.7}) {
        const auto h = CoinHierarchy::classical(e);
        const auto a = rg_wall_amplitudes(5, h, {0.8, 0.2});
        const auto b = rg_wall_amplitudes_precise(5, h, {0.8, 0.2});
        CHECK(a.F_left == doctest::Approx(b.F_left).epsilon(1e-10));
        CHECK(a.F_right == doctest::Approx(b.F_right).epsilon(1e-10));
    }
}

TEST_CASE("RG walls match the time-domain absorption") {
    for (double e : {0.25, 0.5, 0.8}) {
        const auto h = CoinHierarchy::classical(e);
        for (Vec2c ic : {Vec2c{0.5, 0.5}, Vec2c{1.0, 0.0}, Vec2c{0.1, 0.9}}) {
            for (int l : {3, 4, 5}) {
                const auto w = rg_wall_amplitudes_precise(l, h, ic);
                const auto r = run_absorbing(l, h, ic, 10000000, 1e-12);
                CHECK(r.converged);
                CHECK(std::abs(w.F_left - r.cumulative_left.back()) < 1e-3);
                CHECK(std::abs(w.F_right - r.cumulative_right.back()) < 1e-3);
            }
        }
    }
}

TEST_CASE("quantum wall amplitude is a diagnostic") {
    const auto h = CoinHierarchy::quantum(0.5);
    const auto w = rg_wall_amplitudes(4, h, default_ic(Flavor::unitary));
    CHECK_FALSE(w.probabilistic);
    CHECK(std::isfinite(w.F_left));
    CHECK_THROWS_AS(rg_wall_amplitudes_precise(4, h, default_ic(Flavor::unitary)), ConfigError);
}

TEST_CASE("quantum walls absorb everything") {
    for (int l : {3, 4, 5}) {
        for (double e : {0.5, 0.7}) {
            const auto r = run_absorbing(l, CoinHierarchy::quantum(e), default_ic(Flavor::unitary), 10000000, 1e-6);
            CHECK(r.converged);
            CHECK(r.cumulative_left.back() + r.cumulative_right.back() > 0.999);
        }
    }
}

TEST_CASE("wall preconditions") {
    const auto h = CoinHierarchy::classical(0.5);
    CHECK_THROWS_AS(rg_wall_amplitudes(1, h, {0.5, 0.5}), ConfigError);
    CHECK_THROWS_AS(rg_wall_amplitudes(4, h, {Cplx(0, 1), 0.0}), ConfigError);
}
