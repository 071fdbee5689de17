#include "ultrawalk/evolve.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>

namespace ultrawalk {

namespace {

constexpr double kIcTol = 1e-12;

std::size_t index_of(const Lattice& lat, std::int64_t x) {
    return static_cast<std::size_t>(x - lat.x_min);
}

} // namespace

int open_truncation_level(std::int64_t t_max) {
    if (t_max < 0) throw ConfigError("t_max must be non-negative");
    // ceil(log2 t_max) + 1, never below 2 so that the half-width 2^L - 1 exceeds t_max.
    const auto t = static_cast<std::uint64_t>(std::max<std::int64_t>(t_max, 1));
    const int ceil_log2 = static_cast<int>(std::bit_width(t - 1));
    return std::max(2, ceil_log2 + 1);
}

Lattice open_lattice(int truncation_level) {
    if (truncation_level < 1 || truncation_level > 40)
        throw ConfigError("truncation level must lie in [1, 40]");
    const std::int64_t half = (std::int64_t{1} << truncation_level) - 1;
    return {-half, half};
}

Vec2c default_ic(Flavor flavor) {
    if (flavor == Flavor::stochastic) return {0.5, 0.5};
    const double r = 1.0 / std::sqrt(2.0);
    return {Cplx(r, 0.0), Cplx(0.0, r)};
}

double site_density(Flavor flavor, const Vec2c& psi) {
    if (flavor == Flavor::stochastic) return psi.up.real() + psi.down.real();
    return std::norm(psi.up) + std::norm(psi.down);
}

double interior_weight(const WalkState& s) {
    double w = 0.0;
    for (std::size_t i = s.support_lo; i <= s.support_hi; ++i)
        w += site_density(s.flavor, s.amplitudes[i]);
    return w;
}

double total_norm(const WalkState& s) {
    return interior_weight(s) + s.absorbed_left + s.absorbed_right;
}

WalkState init_point(std::int64_t x0, Vec2c psi_ic, Flavor flavor, Lattice lattice,
                     Boundary boundary) {
    if (lattice.x_max < lattice.x_min + 2) throw ConfigError("lattice needs at least 3 sites");
    if (!lattice.contains(x0)) throw ConfigError(fmt::format("start site {} outside lattice", x0));
    if (boundary == Boundary::absorbing && (x0 == lattice.x_min || x0 == lattice.x_max))
        throw ConfigError("start site lies on an absorbing wall");
    if (flavor == Flavor::stochastic) {
        if (psi_ic.up.imag() != 0.0 || psi_ic.down.imag() != 0.0 || psi_ic.up.real() < 0.0 ||
            psi_ic.down.real() < 0.0)
            throw ConfigError("classical initial condition must be real and non-negative");
    }
    const double n = site_density(flavor, psi_ic);
    if (std::abs(n - 1.0) > kIcTol)
        throw ConfigError(fmt::format("initial condition is not normalized (norm {})", n));

    WalkState s;
    s.flavor = flavor;
    s.lattice = lattice;
    s.boundary = boundary;
    s.amplitudes.assign(lattice.size(), Vec2c{});
    s.x0 = x0;
    s.support_lo = s.support_hi = index_of(lattice, x0);
    s.amplitudes[s.support_lo] = psi_ic;
    return s;
}

Evolver::Evolver(const CoinHierarchy& h, int truncation_level, Lattice lattice, Boundary boundary)
    : lattice_(lattice), boundary_(boundary), flavor_(h.flavor()) {
    coins_.resize(lattice.size());
    for (std::int64_t x = lattice.x_min; x <= lattice.x_max; ++x) {
        RealCoin& c = coins_[index_of(lattice, x)];
        if (boundary == Boundary::absorbing && (x == lattice.x_min || x == lattice.x_max)) {
            c = {0.0, 0.0, 0.0, 0.0};
            continue;
        }
        const Mat2c& m = coin_at_site(h, x, truncation_level).matrix();
        c = {m(0, 0).real(), m(0, 1).real(), m(1, 0).real(), m(1, 1).real()};
    }
}

void Evolver::advance(WalkState& s) const {
    if (s.flavor != flavor_ || s.boundary != boundary_ || s.lattice.x_min != lattice_.x_min ||
        s.lattice.x_max != lattice_.x_max)
        throw ConfigError("walk state does not match the evolver's lattice");

    const std::size_t n = s.amplitudes.size();
    const std::size_t lo = s.support_lo == 0 ? 0 : s.support_lo - 1;
    const std::size_t hi = std::min(n - 1, s.support_hi + 1);
    if (boundary_ == Boundary::open && (lo == 0 || hi == n - 1))
        throw LatticeError(fmt::format("lattice too small: support reached the edge at t={}", s.t + 1));

    // In place: the upper outflow of site i is carried to i+1, the lower
    // component of i is read from the still-unmodified site i+1.
    auto& a = s.amplitudes;
    Cplx carry_up{};
    for (std::size_t i = lo; i <= hi; ++i) {
        const Vec2c old = a[i];
        const RealCoin& c = coins_[i];
        const Cplx up_out = c.c00 * old.up + c.c01 * old.down;
        Cplx down_in{};
        if (i + 1 < n) {
            const RealCoin& r = coins_[i + 1];
            down_in = r.c10 * a[i + 1].up + r.c11 * a[i + 1].down;
        }
        a[i] = {carry_up, down_in};
        carry_up = up_out;
    }

    s.support_lo = lo;
    s.support_hi = hi;
    if (boundary_ == Boundary::absorbing) {
        if (lo == 0) {
            s.absorbed_left += site_density(s.flavor, a[0]);
            a[0] = {};
            s.support_lo = 1;
        }
        if (hi == n - 1) {
            s.absorbed_right += site_density(s.flavor, a[n - 1]);
            a[n - 1] = {};
            s.support_hi = n - 2;
        }
    }
    ++s.t;
}

WalkState step(const WalkState& s, const CoinHierarchy& h, int truncation_level) {
    if (s.flavor != h.flavor()) throw ConfigError("walk flavor does not match the coin hierarchy");
    WalkState next = s;
    Evolver(h, truncation_level, s.lattice, s.boundary).advance(next);
    return next;
}

PdfSnapshot snapshot(const WalkState& s) {
    PdfSnapshot p;
    p.t = s.t;
    p.x0 = s.x0;
    p.x_min = s.lattice.x_min;
    p.psi = s.amplitudes;
    p.rho.resize(s.amplitudes.size());
    double interior = 0.0;
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i) {
        const double r = site_density(s.flavor, s.amplitudes[i]);
        p.rho[i] = r;
        const double d = static_cast<double>(s.lattice.x_min + static_cast<std::int64_t>(i) - s.x0);
        p.mean += d * r;
        p.msd += d * d * r;
        interior += r;
    }
    p.norm = interior + s.absorbed_left + s.absorbed_right;
    return p;
}

std::vector<PdfSnapshot> evolve(WalkState s, const CoinHierarchy& h, int truncation_level,
                                std::int64_t t_max, std::vector<std::int64_t> sample_times) {
    if (s.flavor != h.flavor()) throw ConfigError("walk flavor does not match the coin hierarchy");
    std::sort(sample_times.begin(), sample_times.end());
    sample_times.erase(std::unique(sample_times.begin(), sample_times.end()), sample_times.end());
    for (auto t : sample_times) {
        if (t < s.t || t > t_max)
            throw ConfigError(fmt::format("sample time {} outside [{}, {}]", t, s.t, t_max));
    }
    const Evolver ev(h, truncation_level, s.lattice, s.boundary);
    std::vector<PdfSnapshot> out;
    out.reserve(sample_times.size());
    auto next = sample_times.begin();
    while (true) {
        if (next != sample_times.end() && *next == s.t) {
            out.push_back(snapshot(s));
            ++next;
        }
        if (s.t >= t_max || next == sample_times.end()) break;
        ev.advance(s);
    }
    return out;
}

AbsorptionRecord run_absorbing(int level, const CoinHierarchy& h, Vec2c psi_ic,
                               std::int64_t t_max, double tail_tol, std::int64_t record_stride) {
    if (level < 2 || level > 30) throw ConfigError("absorbing system level must lie in [2, 30]");
    if (t_max < 0) throw ConfigError("t_max must be non-negative");
    if (!(tail_tol > 0.0)) throw ConfigError("tail tolerance must be positive");
    if (record_stride <= 0) record_stride = std::max<std::int64_t>(1, t_max / 16384);

    const std::int64_t n = std::int64_t{1} << level;
    const Lattice lat{0, n};
    WalkState s = init_point(n / 2, psi_ic, h.flavor(), lat, Boundary::absorbing);
    const Evolver ev(h, level, lat, Boundary::absorbing);

    AbsorptionRecord rec;
    auto record = [&](double interior) {
        rec.times.push_back(s.t);
        rec.cumulative_left.push_back(s.absorbed_left);
        rec.cumulative_right.push_back(s.absorbed_right);
        rec.interior.push_back(interior);
    };
    record(interior_weight(s));
    while (s.t < t_max) {
        ev.advance(s);
        const double interior = interior_weight(s);
        if (interior < tail_tol) {
            rec.converged = true;
            record(interior);
            break;
        }
        if (s.t % record_stride == 0 || s.t == t_max) record(interior);
    }
    return rec;
}

} // namespace ultrawalk
