#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace myo {

/// Forward-mode dual number carrying N directional derivatives.
template <std::size_t N>
struct Dual {
    double v = 0.0;
    std::array<double, N> d{};

    Dual() = default;
    Dual(double value) : v(value) {}  // NOLINT: implicit promotion of constants
    Dual(double value, const std::array<double, N>& tangent) : v(value), d(tangent) {}

    static Dual variable(double value, std::size_t index) {
        Dual x(value);
        x.d[index] = 1.0;
        return x;
    }

    Dual& operator+=(const Dual& o) {
        v += o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        v -= o.v;
        for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        return *this;
    }
    Dual& operator/=(const Dual& o) {
        const double inv = 1.0 / o.v;
        const double q = v * inv;
        for (std::size_t i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
        v = q;
        return *this;
    }
};

template <std::size_t N>
Dual<N> operator-(Dual<N> a) {
    a.v = -a.v;
    for (auto& x : a.d) x = -x;
    return a;
}
template <std::size_t N>
Dual<N> operator+(Dual<N> a, const Dual<N>& b) { return a += b; }
template <std::size_t N>
Dual<N> operator-(Dual<N> a, const Dual<N>& b) { return a -= b; }
template <std::size_t N>
Dual<N> operator*(Dual<N> a, const Dual<N>& b) { return a *= b; }
template <std::size_t N>
Dual<N> operator/(Dual<N> a, const Dual<N>& b) { return a /= b; }

template <std::size_t N>
Dual<N> operator+(Dual<N> a, double b) { a.v += b; return a; }
template <std::size_t N>
Dual<N> operator+(double a, Dual<N> b) { b.v += a; return b; }
template <std::size_t N>
Dual<N> operator-(Dual<N> a, double b) { a.v -= b; return a; }
template <std::size_t N>
Dual<N> operator-(double a, const Dual<N>& b) { return Dual<N>(a) - b; }
template <std::size_t N>
Dual<N> operator*(Dual<N> a, double b) {
    a.v *= b;
    for (auto& x : a.d) x *= b;
    return a;
}
template <std::size_t N>
Dual<N> operator*(double a, Dual<N> b) { return b * a; }
template <std::size_t N>
Dual<N> operator/(Dual<N> a, double b) { return a * (1.0 / b); }
template <std::size_t N>
Dual<N> operator/(double a, const Dual<N>& b) { return Dual<N>(a) / b; }

template <std::size_t N>
Dual<N> exp(const Dual<N>& a) {
    const double e = std::exp(a.v);
    Dual<N> r(e);
    for (std::size_t i = 0; i < N; ++i) r.d[i] = e * a.d[i];
    return r;
}

template <std::size_t N>
Dual<N> sqrt(const Dual<N>& a) {
    const double s = std::sqrt(a.v);
    const double half_inv = 0.5 / s;
    Dual<N> r(s);
    for (std::size_t i = 0; i < N; ++i) r.d[i] = half_inv * a.d[i];
    return r;
}

/// 1 / sqrt(a) with a single division.
inline double rsqrt(double a) { return 1.0 / std::sqrt(a); }

template <std::size_t N>
Dual<N> rsqrt(const Dual<N>& a) {
    const double q = 1.0 / std::sqrt(a.v);
    const double slope = -0.5 * q * q * q;
    Dual<N> r(q);
    for (std::size_t i = 0; i < N; ++i) r.d[i] = slope * a.d[i];
    return r;
}

inline double value_of(double x) { return x; }
template <std::size_t N>
double value_of(const Dual<N>& x) { return x.v; }

/// min/max selecting by value; the derivative follows the selected branch.
template <class T>
T select_min(const T& a, const T& b) { return value_of(a) <= value_of(b) ? a : b; }
template <class T>
T select_max(const T& a, const T& b) { return value_of(a) >= value_of(b) ? a : b; }

}  // namespace myo
