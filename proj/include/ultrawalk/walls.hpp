#pragma once

// Wall amplitudes for the interval [0, 2^l] with absorbing ends and the walk
// started at 2^(l-1).
//
// After l-1 decimation steps only the walls and the start site remain, and
//   psi_right = S^A (C_{l-1}^{-1} - S^M)^{-1} psi_IC
//   psi_left  = S^B (C_{l-1}^{-1} - S^M)^{-1} psi_IC
// at generating-function argument z.  S^A carries right movers, so it feeds
// the wall at 2^l.  At z = 1 the classical amplitudes sum all arrival times
// and their component sums are the absorption probabilities.  The unitary
// amplitude at z = 1 is a coherent sum and not a probability.

#include "ultrawalk/hierarchy.hpp"
#include "ultrawalk/rg.hpp"

namespace ultrawalk {

struct WallAmplitudes {
    Vec2c psi_left;
    Vec2c psi_right;
    double F_left = 0.0;
    double F_right = 0.0;
    int l = 0;
    bool probabilistic = true; // false for the unitary diagnostic
};

template <class T>
struct WallVectors {
    Vec2<T> left;
    Vec2<T> right;
};

template <class T>
WallVectors<T> rg_wall_vectors(int l, const CoinHierarchy& h, const Vec2<T>& psi_ic,
                               const T& z = T(1)) {
    if (l < 2) throw ConfigError("wall amplitudes need l >= 2");
    auto coin = [&](int level) { return coin_entries<T>(h.flavor(), h.eta_at<T>(level)); };
    rg::ShiftTripleT<T> s = rg::initial_shifts<T>(z);
    for (int k = 0; k < l - 1; ++k) s = rg::sflow_step<T>(s, coin(k));
    const Mat2<T> r = rg::resolvent<T>(coin(l - 1), s.sm, s.k);
    return {(s.sb * r) * psi_ic, (s.sa * r) * psi_ic};
}

WallAmplitudes rg_wall_amplitudes(int l, const CoinHierarchy& h, Vec2c psi_ic, Cplx z = 1.0);

// Classical walls in extended precision; the double route loses the
// absorption sum rule at large l.
WallAmplitudes rg_wall_amplitudes_precise(int l, const CoinHierarchy& h, Vec2c psi_ic);

// l -> infinity limit for the stochastic hierarchy with epsilon <= 1/2.
WallAmplitudes classical_wall_closed_form(double epsilon, Vec2c psi_ic);

} // namespace ultrawalk
