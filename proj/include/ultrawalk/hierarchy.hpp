#pragma once

// Ultrametric hierarchy of coins on the integer line.
//
// Every nonzero site x = 2^i (2j + 1) carries hierarchy level i and the coin
// C_i built from eta_i = eta0 * epsilon^i.  Stochastic coins give the
// (anti-)persistent random walk, unitary coins the quantum walk.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "ultrawalk/error.hpp"
#include "ultrawalk/mat2.hpp"

namespace ultrawalk {

enum class Flavor { stochastic, unitary };
enum class Persistence { anti_persistent, persistent };

std::string_view to_string(Flavor f);
Flavor parse_flavor(std::string_view s);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDefaultUnitaryEta0 = kPi / 4.0;
inline constexpr double kDefaultStochasticEta0 = 0.45;

struct HierarchyIndex {
    int level = 0;          // i >= 0
    std::int64_t index = 0; // j
    friend bool operator==(const HierarchyIndex&, const HierarchyIndex&) = default;
};

// x = 2^i (2j+1); throws ConfigError for x == 0.
HierarchyIndex decompose(std::int64_t x);
std::int64_t recompose(HierarchyIndex h);

class Coin2 {
public:
    // Validates the flavor invariants (row sums / unitarity / invertibility).
    Coin2(Mat2c entries, Flavor flavor);

    const Mat2c& matrix() const { return m_; }
    Flavor flavor() const { return flavor_; }
    const Cplx& operator()(int r, int c) const { return m_(r, c); }

private:
    Mat2c m_;
    Flavor flavor_;
};

// Coin entries for a given eta; shared by the double and extended-precision paths.
//   stochastic: [[eta, 1-eta], [1-eta, eta]]
//   unitary:    [[sin eta, cos eta], [cos eta, -sin eta]]
template <class T>
Mat2<T> coin_entries(Flavor flavor, const T& eta) {
    using std::cos;
    using std::sin;
    if (flavor == Flavor::stochastic) return {eta, T(1) - eta, T(1) - eta, eta};
    const T s = sin(eta);
    const T c = cos(eta);
    return {s, c, c, -s};
}

Coin2 make_coin(Flavor flavor, double eta);

class CoinHierarchy {
public:
    CoinHierarchy(double eta0, double epsilon, Flavor flavor,
                  Persistence persistence = Persistence::anti_persistent);

    static CoinHierarchy classical(double epsilon, double eta0 = kDefaultStochasticEta0,
                                   Persistence p = Persistence::anti_persistent) {
        return {eta0, epsilon, Flavor::stochastic, p};
    }
    static CoinHierarchy quantum(double epsilon, double eta0 = kDefaultUnitaryEta0) {
        return {eta0, epsilon, Flavor::unitary};
    }

    double eta0() const { return eta0_; }
    double epsilon() const { return epsilon_; }
    Flavor flavor() const { return flavor_; }
    Persistence persistence() const { return persistence_; }

    // Level assigned to x = 0.  Defaults to the truncation level L.
    std::optional<int> origin_level() const { return origin_level_; }
    CoinHierarchy with_origin_level(int level) const;

    // eta at hierarchy level i in an arbitrary real type.
    template <class T>
    T eta_at(int level) const {
        using std::pow;
        const T base = T(eta0_) * pow(T(epsilon_), level);
        return persistence_ == Persistence::persistent ? T(1) - base : base;
    }

private:
    double eta0_;
    double epsilon_;
    Flavor flavor_;
    Persistence persistence_;
    std::optional<int> origin_level_;
};

double eta_of_level(const CoinHierarchy& h, int level);
Coin2 coin_at_level(const CoinHierarchy& h, int level);
// Requires L >= 1 and |x| < 2^L.  The origin sits at level L unless overridden.
Coin2 coin_at_site(const CoinHierarchy& h, std::int64_t x, int truncation_level);
int level_at_site(const CoinHierarchy& h, std::int64_t x, int truncation_level);

} // namespace ultrawalk
