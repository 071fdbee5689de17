#include "ultrawalk/walls.hpp"

namespace ultrawalk {

namespace {

double component_sum(const Vec2c& v) { return v.up.real() + v.down.real(); }
double norm_sq(const Vec2c& v) { return std::norm(v.up) + std::norm(v.down); }

void check_classical_ic(const Vec2c& psi) {
    if (psi.up.imag() != 0.0 || psi.down.imag() != 0.0 || psi.up.real() < 0.0 ||
        psi.down.real() < 0.0)
        throw ConfigError("classical initial condition must be real and non-negative");
}

} // namespace

WallAmplitudes rg_wall_amplitudes(int l, const CoinHierarchy& h, Vec2c psi_ic, Cplx z) {
    if (h.flavor() == Flavor::stochastic) check_classical_ic(psi_ic);
    const auto w = rg_wall_vectors<Cplx>(l, h, psi_ic, z);
    WallAmplitudes out{w.left, w.right, 0.0, 0.0, l, h.flavor() == Flavor::stochastic};
    if (out.probabilistic) {
        out.F_left = component_sum(w.left);
        out.F_right = component_sum(w.right);
    } else {
        out.F_left = norm_sq(w.left);
        out.F_right = norm_sq(w.right);
    }
    return out;
}

WallAmplitudes rg_wall_amplitudes_precise(int l, const CoinHierarchy& h, Vec2c psi_ic) {
    using rg::HighPrec;
    if (h.flavor() != Flavor::stochastic)
        throw ConfigError("extended-precision wall amplitudes are classical only");
    check_classical_ic(psi_ic);
    const Vec2<HighPrec> ic{HighPrec(psi_ic.up.real()), HighPrec(psi_ic.down.real())};
    const auto w = rg_wall_vectors<HighPrec>(l, h, ic);
    auto to_c = [](const Vec2<HighPrec>& v) {
        return Vec2c{static_cast<double>(v.up), static_cast<double>(v.down)};
    };
    WallAmplitudes out{to_c(w.left), to_c(w.right), 0.0, 0.0, l, true};
    out.F_left = static_cast<double>(w.left.up + w.left.down);
    out.F_right = static_cast<double>(w.right.up + w.right.down);
    return out;
}

WallAmplitudes classical_wall_closed_form(double epsilon, Vec2c psi_ic) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw ConfigError("epsilon must lie in (0, 1]");
    check_classical_ic(psi_ic);
    const double p = psi_ic.up.real();
    const double q = psi_ic.down.real();
    WallAmplitudes out;
    out.psi_right = {epsilon * p + (1.0 - epsilon) * q, 0.0};
    out.psi_left = {0.0, (1.0 - epsilon) * p + epsilon * q};
    out.F_right = out.psi_right.up.real();
    out.F_left = out.psi_left.down.real();
    out.l = -1;
    return out;
}

} // namespace ultrawalk
