#include "ultrawalk/hierarchy.hpp"

#include <fmt/format.h>

#include <bit>

namespace ultrawalk {

namespace {

constexpr double kCoinTol = 1e-14;

} // namespace

std::string_view to_string(Flavor f) {
    return f == Flavor::stochastic ? "classical" : "quantum";
}

Flavor parse_flavor(std::string_view s) {
    if (s == "classical" || s == "stochastic") return Flavor::stochastic;
    if (s == "quantum" || s == "unitary") return Flavor::unitary;
    throw ConfigError(fmt::format("unknown flavor '{}'", s));
}

HierarchyIndex decompose(std::int64_t x) {
    if (x == 0) throw ConfigError("origin has no hierarchy index");
    const auto mag = static_cast<std::uint64_t>(x < 0 ? -x : x);
    const int i = std::countr_zero(mag);
    // x / 2^i is odd (possibly negative), so odd - 1 divides exactly.
    const std::int64_t odd = x / (std::int64_t{1} << i);
    return {i, (odd - 1) / 2};
}

std::int64_t recompose(HierarchyIndex h) {
    if (h.level < 0 || h.level > 62) throw ConfigError("hierarchy level out of range");
    return (std::int64_t{1} << h.level) * (2 * h.index + 1);
}

Coin2::Coin2(Mat2c entries, Flavor flavor) : m_(entries), flavor_(flavor) {
    if (flavor == Flavor::stochastic) {
        for (const auto& v : m_.e) {
            if (v.imag() != 0.0 || v.real() < 0.0 || v.real() > 1.0)
                throw ConfigError("stochastic coin entries must be real and in [0,1]");
        }
        for (int r = 0; r < 2; ++r) {
            if (std::abs(m_(r, 0).real() + m_(r, 1).real() - 1.0) > kCoinTol)
                throw ConfigError("stochastic coin rows must sum to 1");
        }
    } else {
        const Mat2c adj{std::conj(m_(0, 0)), std::conj(m_(1, 0)), std::conj(m_(0, 1)),
                        std::conj(m_(1, 1))};
        if (max_abs_entry(adj * m_ - Mat2c::identity()) > kCoinTol)
            throw ConfigError("unitary coin violates C^dagger C = I");
    }
    if (std::abs(m_.det()) <= kCoinTol) throw ConfigError("singular coin");
}

Coin2 make_coin(Flavor flavor, double eta) {
    if (flavor == Flavor::stochastic) {
        // eta == 1 (identity coin) is reached by deep levels of the persistent variant.
        if (!(eta > 0.0 && eta <= 1.0))
            throw ConfigError(fmt::format("stochastic coin needs 0 < eta <= 1, got {}", eta));
        if (eta == 0.5) throw ConfigError("singular coin");
    }
    const auto r = coin_entries<double>(flavor, eta);
    return {Mat2c{r.e[0], r.e[1], r.e[2], r.e[3]}, flavor};
}

CoinHierarchy::CoinHierarchy(double eta0, double epsilon, Flavor flavor, Persistence persistence)
    : eta0_(eta0), epsilon_(epsilon), flavor_(flavor), persistence_(persistence) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw ConfigError(fmt::format("epsilon must lie in (0, 1], got {}", epsilon));
    if (flavor == Flavor::stochastic) {
        if (!(eta0 > 0.0 && eta0 < 0.5))
            throw ConfigError(fmt::format("classical eta0 must lie in (0, 1/2), got {}", eta0));
    } else {
        if (persistence != Persistence::anti_persistent)
            throw ConfigError("the persistent variant is classical only");
        if (!(eta0 > 0.0 && eta0 <= kPi / 2.0))
            throw ConfigError(fmt::format("quantum eta0 must lie in (0, pi/2], got {}", eta0));
    }
}

CoinHierarchy CoinHierarchy::with_origin_level(int level) const {
    if (level < 0) throw ConfigError("origin level must be non-negative");
    CoinHierarchy h = *this;
    h.origin_level_ = level;
    return h;
}

double eta_of_level(const CoinHierarchy& h, int level) {
    if (level < 0) throw ConfigError("hierarchy level must be non-negative");
    return h.eta_at<double>(level);
}

Coin2 coin_at_level(const CoinHierarchy& h, int level) {
    return make_coin(h.flavor(), eta_of_level(h, level));
}

int level_at_site(const CoinHierarchy& h, std::int64_t x, int truncation_level) {
    if (truncation_level < 1 || truncation_level > 62)
        throw ConfigError("truncation level must lie in [1, 62]");
    const std::int64_t bound = std::int64_t{1} << truncation_level;
    if (x <= -bound || x >= bound)
        throw ConfigError(fmt::format("site {} outside |x| < 2^{}", x, truncation_level));
    if (x == 0) return h.origin_level().value_or(truncation_level);
    return decompose(x).level;
}

Coin2 coin_at_site(const CoinHierarchy& h, std::int64_t x, int truncation_level) {
    return coin_at_level(h, level_at_site(h, x, truncation_level));
}

} // namespace ultrawalk
