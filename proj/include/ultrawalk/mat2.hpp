#pragma once

// Minimal fixed 2x2 matrix over an arbitrary field type.
//
// The RG flows are iterated with double, std::complex<double> and
// Boost.Multiprecision reals, so the matrix is a plain template rather than
// an Eigen type: the only operations needed are products, sums and a closed
// form inverse.

#include <array>
#include <cmath>
#include <complex>

namespace ultrawalk {

template <class T>
struct Mat2 {
    // Row-major: {m00, m01, m10, m11}.
    std::array<T, 4> e{T(0), T(0), T(0), T(0)};

    constexpr Mat2() = default;
    constexpr Mat2(T m00, T m01, T m10, T m11) : e{m00, m01, m10, m11} {}

    static constexpr Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }
    static constexpr Mat2 zero() { return {}; }
    static constexpr Mat2 diag(T d0, T d1) { return {d0, T(0), T(0), d1}; }
    static constexpr Mat2 antidiag(T u, T l) { return {T(0), u, l, T(0)}; }

    constexpr T& operator()(int r, int c) { return e[2 * r + c]; }
    constexpr const T& operator()(int r, int c) const { return e[2 * r + c]; }

    constexpr T det() const { return e[0] * e[3] - e[1] * e[2]; }
    constexpr T trace() const { return e[0] + e[3]; }

    // Caller is responsible for checking det() against its own threshold.
    constexpr Mat2 inverse() const {
        const T d = det();
        return {e[3] / d, -e[1] / d, -e[2] / d, e[0] / d};
    }

    friend constexpr Mat2 operator+(const Mat2& x, const Mat2& y) {
        return {x.e[0] + y.e[0], x.e[1] + y.e[1], x.e[2] + y.e[2], x.e[3] + y.e[3]};
    }
    friend constexpr Mat2 operator-(const Mat2& x, const Mat2& y) {
        return {x.e[0] - y.e[0], x.e[1] - y.e[1], x.e[2] - y.e[2], x.e[3] - y.e[3]};
    }
    friend constexpr Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.e[0] * y.e[0] + x.e[1] * y.e[2], x.e[0] * y.e[1] + x.e[1] * y.e[3],
                x.e[2] * y.e[0] + x.e[3] * y.e[2], x.e[2] * y.e[1] + x.e[3] * y.e[3]};
    }
    friend constexpr Mat2 operator*(const T& s, const Mat2& x) {
        return {s * x.e[0], s * x.e[1], s * x.e[2], s * x.e[3]};
    }
};

template <class T>
struct Vec2 {
    T up{};
    T down{};
};

template <class T>
constexpr Vec2<T> operator*(const Mat2<T>& m, const Vec2<T>& v) {
    return {m(0, 0) * v.up + m(0, 1) * v.down, m(1, 0) * v.up + m(1, 1) * v.down};
}

template <class T>
auto max_abs_entry(const Mat2<T>& m) {
    using std::abs;
    auto r = abs(m.e[0]);
    for (int i = 1; i < 4; ++i) {
        const auto v = abs(m.e[i]);
        if (v > r) r = v;
    }
    return r;
}

// Squared Frobenius norm; used to scale singularity tests.
template <class T>
auto frobenius_sq(const Mat2<T>& m) {
    using std::abs;
    auto r = abs(m.e[0]) * abs(m.e[0]);
    for (int i = 1; i < 4; ++i) r += abs(m.e[i]) * abs(m.e[i]);
    return r;
}

// Element-type conversion, e.g. multiprecision -> double for reporting.
template <class To, class From>
Mat2<To> mat_cast(const Mat2<From>& m) {
    return {static_cast<To>(m.e[0]), static_cast<To>(m.e[1]), static_cast<To>(m.e[2]),
            static_cast<To>(m.e[3])};
}

using Cplx = std::complex<double>;
using Mat2c = Mat2<Cplx>;
using Vec2c = Vec2<Cplx>;

} // namespace ultrawalk
