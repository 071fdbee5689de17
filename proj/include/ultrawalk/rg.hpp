#pragma once

// Real-space renormalization of the coined walk on the ultrametric line.
//
// Decimating every odd site once per step turns the hopping operators into
// {A,B,M}_i^(k) = S_k^{A,B,M} C_{i+k}; the renormalized shifts obey
//
//   S_{k+1}^{A,B} = S_k^{A,B} (C_k^{-1} - S_k^M)^{-1} S_k^{A,B}
//   S_{k+1}^M     = S_k^M + S_k^A (C_k^{-1} - S_k^M)^{-1} S_k^B
//                         + S_k^B (C_k^{-1} - S_k^M)^{-1} S_k^A
//
// For both coin families the shifts close on two scalars (a_k, m_k).  The
// scalar flows, their transforms and the autonomous large-k maps used for
// fixed-point analysis all live here.
//
// The z = 1 flows are unstable along the relevant direction: rounding errors
// grow like lambda_max^k.  Everything that follows an exact trajectory is a
// template over the scalar type, and `HighPrec` is provided for trajectories
// that must stay on the critical manifold for tens of steps.

#include <array>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <complex>
#include <fmt/format.h>
#include <limits>
#include <string_view>
#include <vector>

#include "ultrawalk/error.hpp"
#include "ultrawalk/hierarchy.hpp"
#include "ultrawalk/mat2.hpp"

namespace ultrawalk::rg {

using HighPrec = boost::multiprecision::cpp_bin_float_100;

// Singularity threshold for the resolvent, relative to its squared norm.
inline constexpr double kResolventTol = 1e-13;

template <class T>
struct ShiftTripleT {
    Mat2<T> sa;
    Mat2<T> sb;
    Mat2<T> sm;
    int k = 0;
};
using ShiftTriple = ShiftTripleT<Cplx>;

// k = 0: S^A, S^B are the projectors (scaled by z), S^M = 0.
template <class T>
ShiftTripleT<T> initial_shifts(const T& z = T(1)) {
    return {Mat2<T>::diag(z, T(0)), Mat2<T>::diag(T(0), z), Mat2<T>::zero(), 0};
}

template <class T>
Mat2<T> resolvent(const Mat2<T>& coin, const Mat2<T>& sm, int k) {
    using std::abs;
    const auto cd = coin.det();
    if (!(abs(cd) > 0)) throw NumericError(fmt::format("RG step singular: coin not invertible at k={}", k));
    const Mat2<T> d = coin.inverse() - sm;
    if (!(abs(d.det()) > kResolventTol * frobenius_sq(d)))
        throw NumericError(fmt::format("RG step singular: C_k^-1 - S^M not invertible at k={}", k));
    return d.inverse();
}

template <class T>
ShiftTripleT<T> sflow_step(const ShiftTripleT<T>& s, const Mat2<T>& coin) {
    const Mat2<T> r = resolvent(coin, s.sm, s.k);
    ShiftTripleT<T> n;
    n.sa = s.sa * r * s.sa;
    n.sb = s.sb * r * s.sb;
    n.sm = s.sm + s.sa * r * s.sb + s.sb * r * s.sa;
    n.k = s.k + 1;
    return n;
}

ShiftTriple sflow_step(const ShiftTriple& s, const Coin2& coin);

// Scalars read off a shift triple plus the largest entry outside the ansatz.
struct AnsatzFit {
    Cplx a;
    Cplx m;
    double off_ansatz = 0.0;
};
template <class T>
struct AnsatzFitT {
    T a;
    T m;
    T off_ansatz;
};

// sb_sign = +1 for the classical closure, -1 for the quantum one.
template <class T>
AnsatzFitT<T> fit_ansatz(const ShiftTripleT<T>& s, int sb_sign) {
    using std::abs;
    AnsatzFitT<T> f{s.sa(0, 0), s.sm(0, 1), T(0)};
    const T off[] = {s.sa(0, 1), s.sa(1, 0), s.sa(1, 1), s.sb(0, 0), s.sb(0, 1), s.sb(1, 0),
                     s.sb(1, 1) - T(sb_sign) * f.a, s.sm(0, 0), s.sm(1, 1), s.sm(1, 0) - f.m};
    for (const auto& v : off) {
        if (abs(v) > abs(f.off_ansatz)) f.off_ansatz = T(abs(v));
    }
    return f;
}

// Classical: SA = diag(a,0), SB = diag(0,a), SM = antidiag(m,m).
AnsatzFit classical_ansatz(const ShiftTriple& s);
// Quantum: SA = diag(a,0), SB = diag(0,-a), SM = antidiag(m,m).
AnsatzFit quantum_ansatz(const ShiftTriple& s);

template <class T>
struct Pair {
    T first;
    T second;
};

// Homogeneous scalar Bernoulli recursion for (A, B, M).
template <class T>
std::array<T, 3> scalar_bernoulli_step(const T& a, const T& b, const T& m) {
    using std::abs;
    if (!(abs(T(1) - m) > 0)) throw NumericError("Bernoulli RG step singular: M = 1");
    const T d = T(1) - m;
    return {a * a / d, b * b / d, m + T(2) * a * b / d};
}

// Classical scalar flow (a_k, m_k) -> (a_{k+1}, m_{k+1}) with coin eta_k.
template <class T>
Pair<T> scalar_classical_step(const T& a, const T& m, const T& eta) {
    using std::abs;
    const T q = T(1) - T(2) * eta;
    const T d = (T(1) - m) * (T(1) - q * m);
    if (!(abs(d) > 0)) throw NumericError("classical RG step singular");
    const T a2 = a * a;
    return {eta * a2 / d, m + a2 * (T(1) - eta - q * m) / d};
}

// Quantum scalar flow; T may be complex, R is the real type of eta.
template <class T, class R>
Pair<T> scalar_quantum_step(const T& a, const T& m, const R& eta) {
    using std::abs;
    using std::cos;
    using std::sin;
    const T c = T(cos(eta));
    const T d = T(1) - T(2) * m * c + m * m;
    if (!(abs(d) > 0)) throw NumericError("quantum RG step singular");
    const T a2 = a * a;
    return {a2 * T(sin(eta)) / d, m + (m - c) * a2 / d};
}

// (a, m) <-> (alpha, mu) for the stochastic coin:
//   a = eta/(1-2eta) alpha,   m = (1-eta)/(1-2eta) - eta/(1-2eta) mu
template <class T>
Pair<T> transform_classical(const T& a, const T& m, const T& eta) {
    using std::abs;
    if (!(abs(eta) > 0) || !(abs(T(1) - T(2) * eta) > 0))
        throw NumericError("classical transform singular for eta in {0, 1/2}");
    const T q = T(1) - T(2) * eta;
    return {a * q / eta, ((T(1) - eta) - m * q) / eta};
}
template <class T>
Pair<T> inverse_transform_classical(const T& alpha, const T& mu, const T& eta) {
    using std::abs;
    if (!(abs(eta) > 0) || !(abs(T(1) - T(2) * eta) > 0))
        throw NumericError("classical transform singular for eta in {0, 1/2}");
    const T q = T(1) - T(2) * eta;
    return {eta * alpha / q, (T(1) - eta) / q - eta * mu / q};
}

// (a, m) <-> (alpha, mu) for the unitary coin:
//   a = alpha sin eta,   m = cos eta - mu sin eta
template <class T, class R>
Pair<T> transform_quantum(const T& a, const T& m, const R& eta) {
    using std::cos;
    using std::sin;
    const R s = sin(eta);
    if (!(s != R(0))) throw NumericError("quantum transform singular for sin(eta) = 0");
    return {a / T(s), (T(cos(eta)) - m) / T(s)};
}
template <class T, class R>
Pair<T> inverse_transform_quantum(const T& alpha, const T& mu, const R& eta) {
    using std::cos;
    using std::sin;
    const R s = sin(eta);
    if (!(s != R(0))) throw NumericError("quantum transform singular for sin(eta) = 0");
    return {alpha * T(s), T(cos(eta)) - mu * T(s)};
}

// Autonomous large-k maps.
template <class T>
Pair<T> flow_classical_autonomous(const T& alpha, const T& mu, double epsilon) {
    using std::abs;
    const T d = mu * mu - T(1);
    if (!(abs(d) > 0)) throw NumericError("classical autonomous flow singular at mu^2 = 1");
    const T q = alpha * alpha / d;
    return {q / T(epsilon), T(1.0 - 1.0 / epsilon) + mu * (T(1) - q) / T(epsilon)};
}

template <class T>
Pair<T> flow_diffusive(const T& x, const T& y) {
    using std::abs;
    if (!(abs(y) > 0)) throw NumericError("diffusive flow singular at y = 0");
    const T q = x * x / y;
    return {q, T(2) * y - q};
}

// Correlated homogeneous Bernoulli flow: A_k = B_k ~ x_k alpha^k, M_k ~ 1 - y_k alpha^k,
// i.e. alpha x' = x^2/y, alpha y' = y - 2 x^2/y.
template <class T>
Pair<T> flow_bernoulli_correlated(const T& x, const T& y, double alpha = 0.5) {
    using std::abs;
    if (!(abs(y) > 0)) throw NumericError("correlated Bernoulli flow singular at y = 0");
    const T q = x * x / y;
    return {q / T(alpha), (y - T(2) * q) / T(alpha)};
}

template <class T>
Pair<T> flow_quantum_autonomous(const T& alpha, const T& nu, double epsilon) {
    const double e2 = epsilon * epsilon;
    return {alpha * alpha / T(epsilon),
            nu * (T(1) + alpha * alpha) / T(e2) - T((1.0 - e2) / (2.0 * e2))};
}

// Intermediate quantum map in (alpha, mu); eta_k = 0 drops the small drift term.
template <class T>
Pair<T> flow_quantum_intermediate(const T& alpha, const T& mu, double eta_k, double epsilon) {
    using std::abs;
    const T d = mu * mu + T(1);
    if (!(abs(d) > 0)) throw NumericError("quantum intermediate flow singular at mu^2 = -1");
    const T q = alpha * alpha / d;
    return {q / T(epsilon),
            mu * (T(1) + q) / T(epsilon) + T(0.5 * eta_k * (epsilon - 1.0 / epsilon))};
}

// ---------------------------------------------------------------------------
// Exact non-autonomous trajectories.

template <class T>
struct TrajectoryPoint {
    int k;
    T a, m;         // raw scalars
    T alpha, mu;    // transformed with eta_k
};

// Classical flow from (a_0, m_0) = (z, 0); returns points k = 0..steps.
template <class T>
std::vector<TrajectoryPoint<T>> classical_trajectory(double eta0, double epsilon, int steps,
                                                     const T& z = T(1)) {
    using std::pow;
    std::vector<TrajectoryPoint<T>> out;
    T a = z;
    T m = T(0);
    for (int k = 0;; ++k) {
        const T eta = T(eta0) * pow(T(epsilon), k);
        const auto am = transform_classical<T>(a, m, eta);
        out.push_back({k, a, m, am.first, am.second});
        if (k == steps) break;
        const auto n = scalar_classical_step<T>(a, m, eta);
        a = n.first;
        m = n.second;
    }
    return out;
}

// Quantum flow seeded at k = 1 with (z^2 sin eta0, z^2 cos eta0); returns k = 1..steps+1.
template <class T>
std::vector<TrajectoryPoint<T>> quantum_trajectory(double eta0, double epsilon, int steps,
                                                   const T& z = T(1)) {
    using std::pow;
    using std::sin;
    using std::cos;
    std::vector<TrajectoryPoint<T>> out;
    const T e0 = T(eta0);
    T a = z * z * sin(e0);
    T m = z * z * cos(e0);
    for (int k = 1;; ++k) {
        const T eta = e0 * pow(T(epsilon), k);
        const auto am = transform_quantum<T, T>(a, m, eta);
        out.push_back({k, a, m, am.first, am.second});
        if (k == steps + 1) break;
        const auto n = scalar_quantum_step<T, T>(a, m, eta);
        a = n.first;
        m = n.second;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Flow state over all branches.

enum class Branch {
    classical_raw,          // (a, m), eta_k = eta0 eps^k
    classical_transformed,  // (alpha, mu), autonomous map
    classical_diffusive,    // (x, y)
    bernoulli,              // (A, B, M), homogeneous scalar coin
    bernoulli_correlated,   // (x, y) with alpha = 1/2
    quantum_raw,            // (a, m), seeded at k = 1
    quantum_transformed,    // (alpha, mu), intermediate map with eta_k drift
    quantum_autonomous,     // (alpha, nu)
};

std::string_view to_string(Branch b);
Branch parse_branch(std::string_view s);
bool is_autonomous(Branch b);

struct FlowState {
    Branch branch = Branch::classical_raw;
    std::array<Cplx, 3> values{};
    int k = 0;
    double epsilon = 1.0;
    double eta0 = 0.0;
    Cplx z = 1.0;
};

FlowState flow_initial(Branch b, double epsilon, double eta0, Cplx z = 1.0);
FlowState flow_advance(const FlowState& s);

// ---------------------------------------------------------------------------
// Fixed points.

enum class DwRule { log2_lambda_max, log2_geometric_mean };

struct FixedPointReport {
    Branch branch = Branch::classical_transformed;
    double epsilon = 1.0;
    std::array<Cplx, 2> fp{};
    Mat2c jacobian;
    Mat2c jacobian_fd;
    double jacobian_fd_deviation = 0.0;
    std::array<Cplx, 2> eigenvalues{}; // by modulus, descending
    double residual = 0.0;
    int iterations = 0;
    DwRule dw_rule = DwRule::log2_lambda_max;
    double dw = 0.0;
    bool physical = false;
    std::string_view method = "newton";
};

// Map and analytic Jacobian of an autonomous branch (quantum_transformed drops eta_k).
std::array<Cplx, 2> autonomous_map(Branch b, double epsilon, const std::array<Cplx, 2>& p);
Mat2c autonomous_jacobian(Branch b, double epsilon, const std::array<Cplx, 2>& p);
Mat2c finite_difference_jacobian(Branch b, double epsilon, const std::array<Cplx, 2>& p,
                                 double step = 1e-6);

// Closed-form physical fixed point of each autonomous branch.
std::array<Cplx, 2> closed_form_fixed_point(Branch b, double epsilon);
// Closed form perturbed by 5%.
std::array<Cplx, 2> default_guess(Branch b, double epsilon);

std::array<Cplx, 2> eigenvalues_2x2(const Mat2c& m);

FixedPointReport find_fixed_point(Branch b, double epsilon, std::array<Cplx, 2> guess,
                                  int max_iter = 200, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Walk dimensions.

double dw_classical(double epsilon);
double dw_quantum(double epsilon);
double lambda_plus(double epsilon);
double lambda_minus(double epsilon);
// Walk dimension implied by lambda_plus (the unphysical branch).
double dw_lambda_plus(double epsilon);

} // namespace ultrawalk::rg
