#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

#include "twocentre/core.hpp"

namespace twocentre {

/// Forward-mode dual scalar carrying N partial derivatives.
///
/// Nesting Dual<Dual<double,N>,N> yields second derivatives, which the
/// property tests use for brackets of brackets (Jacobi identity).
template <typename T, std::size_t N>
struct Dual {
    T v{};
    std::array<T, N> d{};

    Dual() = default;
    Dual(const T& value) : v(value) { d.fill(T{}); }  // NOLINT: implicit lift of constants
    Dual(const T& value, const std::array<T, N>& grad) : v(value), d(grad) {}

    // lifts plain numbers through nested duals (double -> Dual<Dual<..>,..>)
    template <typename S,
              std::enable_if_t<std::is_arithmetic_v<S> && !std::is_same_v<S, T>, int> = 0>
    Dual(S value) : v(static_cast<T>(value)) {  // NOLINT
        d.fill(T{});
    }

    static Dual seeded(const T& value, std::size_t slot) {
        Dual out(value);
        out.d[slot] = T{1};
        return out;
    }

    Dual operator-() const {
        Dual out(-v);
        for (std::size_t i = 0; i < N; ++i) out.d[i] = -d[i];
        return out;
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

    friend Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) { return a -= b; }

    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual out(a.v * b.v);
        for (std::size_t i = 0; i < N; ++i) out.d[i] = a.d[i] * b.v + a.v * b.d[i];
        return out;
    }
    friend Dual operator/(const Dual& a, const Dual& b) {
        Dual out(a.v / b.v);
        const T inv2 = T{1} / (b.v * b.v);
        for (std::size_t i = 0; i < N; ++i) out.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
        return out;
    }

    friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
    friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
    friend bool operator<=(const Dual& a, const Dual& b) { return a.v <= b.v; }
    friend bool operator>=(const Dual& a, const Dual& b) { return a.v >= b.v; }
};

using std::sqrt;

template <typename T, std::size_t N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
    using std::sqrt;
    Dual<T, N> out(sqrt(a.v));
    const T half_inv = T{0.5} / out.v;
    for (std::size_t i = 0; i < N; ++i) out.d[i] = a.d[i] * half_inv;
    return out;
}

template <typename T, std::size_t N>
T value_of(const Dual<T, N>& a) {
    return a.v;
}
inline double value_of(double a) { return a; }

/// Plain double value beneath arbitrarily nested duals.
inline double deep_value(double a) { return a; }
template <typename T, std::size_t N>
double deep_value(const Dual<T, N>& a) {
    return deep_value(a.v);
}

/// Scalar type used for bracket evaluation at phase points of scalar T.
template <typename T>
using DualPhase = Dual<T, 6>;

/// Seed the six coordinates (M1,M2,M3,q1,q2,q3) with the identity Jacobian.
template <typename T>
PhasePointT<DualPhase<T>> seed_phase_point(const PhasePointT<T>& x) {
    PhasePointT<DualPhase<T>> out;
    out.M.x1 = DualPhase<T>::seeded(x.M.x1, 0);
    out.M.x2 = DualPhase<T>::seeded(x.M.x2, 1);
    out.M.x3 = DualPhase<T>::seeded(x.M.x3, 2);
    out.q.x1 = DualPhase<T>::seeded(x.q.x1, 3);
    out.q.x2 = DualPhase<T>::seeded(x.q.x2, 4);
    out.q.x3 = DualPhase<T>::seeded(x.q.x3, 5);
    return out;
}

}  // namespace twocentre
