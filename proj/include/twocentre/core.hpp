#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twocentre {

inline constexpr const char* version = "0.1.0";

/// Metric signature of the underlying Lie-Poisson structure.
/// Euclidean: e(3)*, J = id.  Lorentzian: so(2,1)*, J = diag(-1,-1,1).
enum class Signature { Euclidean, Lorentzian };

template <typename T>
struct Vec3T {
    T x1{}, x2{}, x3{};

    constexpr T& operator[](int i) { return i == 0 ? x1 : (i == 1 ? x2 : x3); }
    constexpr const T& operator[](int i) const { return i == 0 ? x1 : (i == 1 ? x2 : x3); }
};

using Vec3 = Vec3T<double>;

template <typename T>
constexpr Vec3T<T> operator+(const Vec3T<T>& a, const Vec3T<T>& b) {
    return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3};
}
template <typename T>
constexpr Vec3T<T> operator-(const Vec3T<T>& a, const Vec3T<T>& b) {
    return {a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3};
}
template <typename T, typename S>
constexpr Vec3T<T> operator*(const S& s, const Vec3T<T>& a) {
    return {s * a.x1, s * a.x2, s * a.x3};
}
template <typename T>
constexpr Vec3T<T> operator-(const Vec3T<T>& a) {
    return {-a.x1, -a.x2, -a.x3};
}

template <typename T>
constexpr T dot(const Vec3T<T>& a, const Vec3T<T>& b) {
    return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3;
}

template <typename T>
constexpr Vec3T<T> cross(const Vec3T<T>& a, const Vec3T<T>& b) {
    return {a.x2 * b.x3 - a.x3 * b.x2,
            a.x3 * b.x1 - a.x1 * b.x3,
            a.x1 * b.x2 - a.x2 * b.x1};
}

/// Apply the signature matrix J (identity or diag(-1,-1,1)).
template <typename T>
constexpr Vec3T<T> apply_j(const Vec3T<T>& v, Signature sig) {
    if (sig == Signature::Euclidean) return v;
    return {-v.x1, -v.x2, v.x3};
}

/// Signature-aware inner product (v, Jw).
template <typename T>
constexpr T dot_j(const Vec3T<T>& a, const Vec3T<T>& b, Signature sig) {
    return dot(a, apply_j(b, sig));
}

/// Point of the six-dimensional phase space: angular momentum M and
/// position q in the ambient 3-space.
template <typename T>
struct PhasePointT {
    Vec3T<T> M;
    Vec3T<T> q;
};

using PhasePoint = PhasePointT<double>;

inline bool is_finite(const PhasePoint& x) {
    return std::isfinite(x.M.x1) && std::isfinite(x.M.x2) && std::isfinite(x.M.x3) &&
           std::isfinite(x.q.x1) && std::isfinite(x.q.x2) && std::isfinite(x.q.x3);
}

struct evaluation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct chart_error : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace twocentre
