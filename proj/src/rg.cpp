#include "ultrawalk/rg.hpp"

#include <algorithm>
#include <cmath>

namespace ultrawalk::rg {

namespace {

using P2 = std::array<Cplx, 2>;

double max_mod(const P2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 1.0))
        throw ConfigError(fmt::format("epsilon must lie in (0, 1], got {}", epsilon));
}

bool is_real(const Cplx& v) { return std::abs(v.imag()) <= 1e-12 * std::max(1.0, std::abs(v.real())); }

} // namespace

ShiftTriple sflow_step(const ShiftTriple& s, const Coin2& coin) {
    return sflow_step<Cplx>(s, coin.matrix());
}

AnsatzFit classical_ansatz(const ShiftTriple& s) {
    const auto f = fit_ansatz<Cplx>(s, +1);
    return {f.a, f.m, std::abs(f.off_ansatz)};
}

AnsatzFit quantum_ansatz(const ShiftTriple& s) {
    const auto f = fit_ansatz<Cplx>(s, -1);
    return {f.a, f.m, std::abs(f.off_ansatz)};
}

std::string_view to_string(Branch b) {
    switch (b) {
    case Branch::classical_raw: return "classical-raw";
    case Branch::classical_transformed: return "classical-transformed";
    case Branch::classical_diffusive: return "classical-diffusive";
    case Branch::bernoulli: return "bernoulli";
    case Branch::bernoulli_correlated: return "bernoulli-correlated";
    case Branch::quantum_raw: return "quantum-raw";
    case Branch::quantum_transformed: return "quantum-transformed";
    case Branch::quantum_autonomous: return "quantum-autonomous";
    }
    return "unknown";
}

Branch parse_branch(std::string_view s) {
    for (auto b : {Branch::classical_raw, Branch::classical_transformed, Branch::classical_diffusive,
                   Branch::bernoulli, Branch::bernoulli_correlated, Branch::quantum_raw,
                   Branch::quantum_transformed, Branch::quantum_autonomous}) {
        if (to_string(b) == s) return b;
    }
    // Short aliases used on the command line.
    if (s == "classical-autonomous") return Branch::classical_transformed;
    if (s == "diffusive") return Branch::classical_diffusive;
    if (s == "quantum-intermediate") return Branch::quantum_transformed;
    throw ConfigError(fmt::format("unknown RG branch '{}'", s));
}

bool is_autonomous(Branch b) {
    return b == Branch::classical_transformed || b == Branch::classical_diffusive ||
           b == Branch::bernoulli_correlated || b == Branch::quantum_transformed ||
           b == Branch::quantum_autonomous;
}

FlowState flow_initial(Branch b, double epsilon, double eta0, Cplx z) {
    require_epsilon(epsilon);
    FlowState s{b, {}, 0, epsilon, eta0, z};
    switch (b) {
    case Branch::classical_raw:
        s.values = {z, 0.0, 0.0};
        break;
    case Branch::classical_transformed: {
        const auto am = transform_classical<Cplx>(z, 0.0, eta0);
        s.values = {am.first, am.second, 0.0};
        break;
    }
    case Branch::classical_diffusive: {
        // alpha_0 = x_0, mu_0 = 1 + y_0.
        const auto am = transform_classical<Cplx>(z, 0.0, eta0);
        s.values = {am.first, am.second - 1.0, 0.0};
        break;
    }
    case Branch::bernoulli:
        s.values = {z / 2.0, z / 2.0, 0.0};
        break;
    case Branch::bernoulli_correlated:
        s.values = {z / 2.0, 1.0, 0.0};
        break;
    case Branch::quantum_raw:
    case Branch::quantum_transformed:
    case Branch::quantum_autonomous: {
        s.k = 1;
        const Cplx a1 = z * z * std::sin(eta0);
        const Cplx m1 = z * z * std::cos(eta0);
        if (b == Branch::quantum_raw) {
            s.values = {a1, m1, 0.0};
        } else {
            const double eta1 = eta0 * epsilon;
            const auto am = transform_quantum<Cplx, double>(a1, m1, eta1);
            s.values = {am.first, b == Branch::quantum_autonomous ? am.second / eta1 : am.second, 0.0};
        }
        break;
    }
    }
    return s;
}

FlowState flow_advance(const FlowState& s) {
    FlowState n = s;
    const auto& v = s.values;
    const double eta_k = s.eta0 * std::pow(s.epsilon, s.k);
    switch (s.branch) {
    case Branch::classical_raw: {
        const auto r = scalar_classical_step<Cplx>(v[0], v[1], eta_k);
        n.values = {r.first, r.second, 0.0};
        break;
    }
    case Branch::classical_transformed: {
        const auto r = flow_classical_autonomous<Cplx>(v[0], v[1], s.epsilon);
        n.values = {r.first, r.second, 0.0};
        break;
    }
    case Branch::classical_diffusive: {
        const auto r = flow_diffusive<Cplx>(v[0], v[1]);
        n.values = {r.first, r.second, 0.0};
        break;
    }
    case Branch::bernoulli: {
        const auto r = scalar_bernoulli_step<Cplx>(v[0], v[1], v[2]);
        n.values = {r[0], r[1], r[2]};
        break;
    }
    case Branch::bernoulli_correlated: {
        const auto r = flow_bernoulli_correlated<Cplx>(v[0], v[1]);
        n.values = {r.first, r.second, 0.0};
        break;
    }
    case Branch::quantum_raw: {
        const auto r = scalar_quantum_step<Cplx, double>(v[0], v[1], eta_k);
        n.values = {r.first, r.second, 0.0};
        break;
    }
    case Branch::quantum_transformed: {
        const auto r = flow_quantum_intermediate<Cplx>(v[0], v[1], eta_k, s.epsilon);
        n.values = {r.first, r.second, 0.0};
        break;
    }
    case Branch::quantum_autonomous: {
        const auto r = flow_quantum_autonomous<Cplx>(v[0], v[1], s.epsilon);
        n.values = {r.first, r.second, 0.0};
        break;
    }
    }
    ++n.k;
    return n;
}

P2 autonomous_map(Branch b, double epsilon, const P2& p) {
    Pair<Cplx> r{};
    switch (b) {
    case Branch::classical_transformed: r = flow_classical_autonomous<Cplx>(p[0], p[1], epsilon); break;
    case Branch::classical_diffusive: r = flow_diffusive<Cplx>(p[0], p[1]); break;
    case Branch::bernoulli_correlated: r = flow_bernoulli_correlated<Cplx>(p[0], p[1]); break;
    case Branch::quantum_transformed: r = flow_quantum_intermediate<Cplx>(p[0], p[1], 0.0, epsilon); break;
    case Branch::quantum_autonomous: r = flow_quantum_autonomous<Cplx>(p[0], p[1], epsilon); break;
    default: throw ConfigError(fmt::format("branch {} has no autonomous map", to_string(b)));
    }
    return {r.first, r.second};
}

Mat2c autonomous_jacobian(Branch b, double epsilon, const P2& p) {
    const Cplx x = p[0];
    const Cplx y = p[1];
    const double e = epsilon;
    switch (b) {
    case Branch::classical_transformed: {
        const Cplx d = y * y - 1.0;
        const Cplx q = x * x / d;
        return {2.0 * x / (e * d), -2.0 * x * x * y / (e * d * d), -2.0 * x * y / (e * d),
                (1.0 - q) / e + 2.0 * y * y * x * x / (e * d * d)};
    }
    case Branch::classical_diffusive:
        return {2.0 * x / y, -x * x / (y * y), -2.0 * x / y, 2.0 + x * x / (y * y)};
    case Branch::bernoulli_correlated:
        return {4.0 * x / y, -2.0 * x * x / (y * y), -8.0 * x / y, 2.0 + 4.0 * x * x / (y * y)};
    case Branch::quantum_transformed: {
        const Cplx d = y * y + 1.0;
        const Cplx q = x * x / d;
        return {2.0 * x / (e * d), -2.0 * x * x * y / (e * d * d), 2.0 * x * y / (e * d),
                (1.0 + q) / e - 2.0 * y * y * x * x / (e * d * d)};
    }
    case Branch::quantum_autonomous:
        return {2.0 * x / e, 0.0, 2.0 * x * y / (e * e), (1.0 + x * x) / (e * e)};
    default:
        throw ConfigError(fmt::format("branch {} has no autonomous map", to_string(b)));
    }
}

Mat2c finite_difference_jacobian(Branch b, double epsilon, const P2& p, double step) {
    Mat2c j;
    for (int c = 0; c < 2; ++c) {
        const double h = step * std::max(1.0, std::abs(p[c]));
        P2 plus = p;
        P2 minus = p;
        plus[c] += h;
        minus[c] -= h;
        const P2 fp = autonomous_map(b, epsilon, plus);
        const P2 fm = autonomous_map(b, epsilon, minus);
        for (int r = 0; r < 2; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    }
    return j;
}

P2 closed_form_fixed_point(Branch b, double epsilon) {
    require_epsilon(epsilon);
    const double e = epsilon;
    switch (b) {
    case Branch::classical_transformed: return {1.0 / e - 2.0, 1.0 / e - 1.0};
    case Branch::classical_diffusive: return {1.0, 1.0};
    case Branch::bernoulli_correlated: return {0.5, 1.0};
    case Branch::quantum_transformed:
        return {1.0 - 1.0 / e, Cplx(0.0, std::sqrt(1.0 - 1.0 / e + 1.0 / (e * e)))};
    case Branch::quantum_autonomous: return {e, 0.5 * (1.0 - e * e)};
    default: throw ConfigError(fmt::format("branch {} has no autonomous map", to_string(b)));
    }
}

P2 default_guess(Branch b, double epsilon) {
    P2 g = closed_form_fixed_point(b, epsilon);
    for (auto& v : g) v *= 1.05;
    return g;
}

P2 eigenvalues_2x2(const Mat2c& m) {
    const Cplx half_tr = 0.5 * m.trace();
    const Cplx disc = std::sqrt(half_tr * half_tr - m.det());
    P2 ev{half_tr + disc, half_tr - disc};
    if (std::abs(ev[1]) > std::abs(ev[0])) std::swap(ev[0], ev[1]);
    return ev;
}

FixedPointReport find_fixed_point(Branch b, double epsilon, P2 guess, int max_iter, double tol) {
    require_epsilon(epsilon);
    if (!is_autonomous(b)) throw ConfigError(fmt::format("branch {} has no autonomous map", to_string(b)));
    for (const auto& v : guess) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ConfigError("fixed-point guess must be finite");
    }

    FixedPointReport rep;
    rep.branch = b;
    rep.epsilon = epsilon;
    P2 p = guess;
    auto residual_of = [&](const P2& q) {
        const P2 f = autonomous_map(b, epsilon, q);
        return P2{f[0] - q[0], f[1] - q[1]};
    };

    // The diffusive and correlated maps are homogeneous of degree one, so
    // their fixed points form rays and a full Newton step lands on the
    // origin.  Fix the scale at the guessed y and solve for x alone.
    const bool ray = b == Branch::classical_diffusive || b == Branch::bernoulli_correlated;

    // The classical map also fixes the whole line alpha = 0, which attracts
    // Newton near epsilon = 1/2.  Dividing the alpha residual by alpha removes
    // that root: g0 = alpha / (epsilon (mu^2 - 1)) - 1.
    const bool deflate = b == Branch::classical_transformed;
    auto work_of = [&](const P2& q) {
        P2 g = residual_of(q);
        if (deflate) {
            if (!(std::abs(q[0]) > 0.0)) throw NumericError("deflated residual singular at alpha = 0");
            g[0] /= q[0];
        }
        return g;
    };

    P2 r = residual_of(p);
    int it = 0;
    while (max_mod(r) >= tol) {
        if (it == max_iter)
            throw NumericError(fmt::format("fixed point of {} at epsilon={} did not converge "
                                           "after {} iterations (residual {:.3e})",
                                           to_string(b), epsilon, max_iter, max_mod(r)));
        Mat2c k = autonomous_jacobian(b, epsilon, p) - Mat2c::identity();
        if (ray) {
            if (!(std::abs(k(0, 0)) > 0.0)) throw NumericError("Newton step singular");
            p[0] -= r[0] / k(0, 0);
            r = residual_of(p);
            ++it;
            continue;
        }
        P2 g = r;
        if (deflate) {
            const Cplx dd = p[1] * p[1] - 1.0;
            g = work_of(p);
            k(0, 0) = 1.0 / (epsilon * dd);
            k(0, 1) = -2.0 * p[0] * p[1] / (epsilon * dd * dd);
        }
        Mat2c kinv;
        const double scale = frobenius_sq(k);
        if (std::abs(k.det()) > 1e-10 * scale) {
            kinv = k.inverse();
        } else {
            // Line of fixed points: minimum-norm step from the rank-one pseudo-inverse.
            if (!(scale > 0.0)) throw NumericError("Newton step singular");
            kinv = Mat2c{std::conj(k(0, 0)), std::conj(k(1, 0)), std::conj(k(0, 1)),
                         std::conj(k(1, 1))};
            for (auto& v : kinv.e) v /= scale;
        }
        const P2 d{-(kinv(0, 0) * g[0] + kinv(0, 1) * g[1]), -(kinv(1, 0) * g[0] + kinv(1, 1) * g[1])};
        // Halve the step while it lands where the map is singular or not finite.
        double t = 1.0;
        for (int h = 0;; ++h) {
            const P2 q{p[0] + t * d[0], p[1] + t * d[1]};
            try {
                const P2 gq = work_of(q);
                if (std::isfinite(max_mod(gq))) {
                    p = q;
                    r = residual_of(q);
                    break;
                }
            } catch (const NumericError&) {
            }
            if (h == 40) throw NumericError("Newton step lands on a singular point");
            t *= 0.5;
        }
        ++it;
    }

    rep.fp = p;
    rep.residual = max_mod(r);
    rep.iterations = it;
    rep.jacobian = autonomous_jacobian(b, epsilon, p);
    rep.jacobian_fd = finite_difference_jacobian(b, epsilon, p);
    for (int i = 0; i < 4; ++i) {
        const double dev = std::abs(rep.jacobian.e[i] - rep.jacobian_fd.e[i]) /
                           std::max(1.0, std::abs(rep.jacobian.e[i]));
        rep.jacobian_fd_deviation = std::max(rep.jacobian_fd_deviation, dev);
    }
    rep.eigenvalues = eigenvalues_2x2(rep.jacobian);

    const double inf = std::numeric_limits<double>::infinity();
    if (b == Branch::quantum_autonomous) {
        rep.dw_rule = DwRule::log2_geometric_mean;
        const double g = std::sqrt(std::abs(rep.eigenvalues[0] * rep.eigenvalues[1]));
        rep.dw = g > 1.0 ? std::log2(g) : inf;
    } else {
        rep.dw_rule = DwRule::log2_lambda_max;
        const double l = std::abs(rep.eigenvalues[0]);
        rep.dw = l > 1.0 ? std::log2(l) : inf;
    }

    switch (b) {
    case Branch::classical_transformed:
        // alpha = 0 is the singular line mu^2 = 1 where the map is 0/0.
        rep.physical = is_real(p[0]) && is_real(p[1]) && p[0].real() > 1e-9 && p[1].real() >= 0.0;
        break;
    case Branch::quantum_autonomous:
        rep.physical = is_real(p[0]) && is_real(p[1]) && std::isfinite(p[1].real());
        break;
    case Branch::quantum_transformed:
        rep.physical = false;
        break;
    default:
        rep.physical = true;
    }
    return rep;
}

double dw_classical(double epsilon) {
    require_epsilon(epsilon);
    return std::max(2.0, 1.0 - std::log2(epsilon));
}

double dw_quantum(double epsilon) {
    require_epsilon(epsilon);
    return 0.5 + 0.5 * std::log2(1.0 + 1.0 / (epsilon * epsilon));
}

namespace {
double lambda_center(double epsilon) {
    require_epsilon(epsilon);
    return 1.0 / epsilon + 0.5 + epsilon;
}
} // namespace

double lambda_plus(double epsilon) {
    const double c = lambda_center(epsilon);
    return c + std::sqrt(c * c - 2.0);
}

// Smaller root of lambda^2 - 2c lambda + 2 = 0 without cancellation.
double lambda_minus(double epsilon) {
    const double c = lambda_center(epsilon);
    return 2.0 / (c + std::sqrt(c * c - 2.0));
}

double dw_lambda_plus(double epsilon) { return std::log2(lambda_plus(epsilon)); }

} // namespace ultrawalk::rg
