#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "twocentre/core.hpp"
#include "twocentre/dual.hpp"
#include "twocentre/poisson.hpp"

namespace twocentre {

enum class Model { Spherical, Hyperbolic, DeSitter };

inline const char* model_name(Model m) {
    switch (m) {
        case Model::Spherical: return "spherical";
        case Model::Hyperbolic: return "hyperbolic";
        default: return "de-sitter";
    }
}

/// Parameters of the two-centre family.
///
/// Valid regimes: spherical A > B > 0, hyperbolic B > A > 0,
/// de Sitter B > 0 > A. The de Sitter variant is a real analytic
/// continuation of the hyperbolic pair and must be opted into with
/// the experimental flag.
struct SystemParams {
    double A = 2.0;
    double B = 1.0;
    double mu = 1.0;
    Model model = Model::Spherical;
    bool experimental = false;

    Signature signature() const {
        return model == Model::Spherical ? Signature::Euclidean : Signature::Lorentzian;
    }

    void validate() const {
        switch (model) {
            case Model::Spherical:
                if (!(A > B && B > 0))
                    throw std::invalid_argument("spherical model requires A > B > 0");
                break;
            case Model::Hyperbolic:
                if (!(B > A && A > 0))
                    throw std::invalid_argument("hyperbolic model requires B > A > 0");
                break;
            case Model::DeSitter:
                if (!(B > 0 && A < 0))
                    throw std::invalid_argument("de Sitter model requires B > 0 > A");
                if (!experimental)
                    throw std::invalid_argument(
                        "de Sitter model is experimental; set experimental=true to enable");
                break;
        }
    }
};

namespace detail {
constexpr double singular_r_floor = 1e-12;
}

/// R(q). Spherical: A q2^2 + B q1^2 + (A+B) q3^2 - 2 sqrt(AB) |q| q3.
/// Hyperbolic: same display with the Lorentzian norm. De Sitter: the real
/// continuation with n = sqrt(-(q,Jq)) and s = sqrt(|A| B),
///   R = B q1^2 + A q2^2 - (A+B) q3^2 - 2 s n q3.
template <typename T>
T R_value_t(const Vec3T<T>& q, const SystemParams& p) {
    using std::sqrt;
    switch (p.model) {
        case Model::Spherical: {
            const T nq = sqrt(dot(q, q));
            return p.A * q.x2 * q.x2 + p.B * q.x1 * q.x1 + (p.A + p.B) * q.x3 * q.x3 -
                   2.0 * std::sqrt(p.A * p.B) * nq * q.x3;
        }
        case Model::Hyperbolic: {
            const T nq = sqrt(dot_j(q, q, Signature::Lorentzian));
            return -p.A * q.x2 * q.x2 - p.B * q.x1 * q.x1 + (p.A + p.B) * q.x3 * q.x3 -
                   2.0 * std::sqrt(p.A * p.B) * nq * q.x3;
        }
        default: {
            const T n = sqrt(T{} - dot_j(q, q, Signature::Lorentzian));
            return p.B * q.x1 * q.x1 + p.A * q.x2 * q.x2 - (p.A + p.B) * q.x3 * q.x3 -
                   2.0 * std::sqrt(std::abs(p.A) * p.B) * n * q.x3;
        }
    }
}

inline double R_value(const Vec3& q, const SystemParams& p) { return R_value_t(q, p); }

/// Spherical R in the manifestly nonnegative form (A-B) q2^2 + (sqrt(A) q3 - sqrt(B)|q|)^2.
template <typename T>
T R_value_sum_of_squares(const Vec3T<T>& q, const SystemParams& p) {
    using std::sqrt;
    const T nq = sqrt(dot(q, q));
    const T w = std::sqrt(p.A) * q.x3 - std::sqrt(p.B) * nq;
    return (p.A - p.B) * q.x2 * q.x2 + w * w;
}

template <typename T>
T hamiltonian_t(const PhasePointT<T>& x, const SystemParams& p) {
    using std::sqrt;
    switch (p.model) {
        case Model::Spherical: {
            const T kin = 0.5 * dot(x.M, x.M);
            if (p.mu == 0.0) return kin;
            const T R = R_value_t(x.q, p);
            if (deep_value(R) <= detail::singular_r_floor)
                throw std::domain_error("hamiltonian: at/inside singular set (R <= 0)");
            return kin - p.mu * sqrt(dot(x.q, x.q)) / sqrt(R);
        }
        case Model::Hyperbolic: {
            const T kin =
                0.5 * (x.M.x1 * x.M.x1 + x.M.x2 * x.M.x2 - x.M.x3 * x.M.x3);
            if (p.mu == 0.0) return kin;
            const T c1 = dot_j(x.q, x.q, Signature::Lorentzian);
            if (deep_value(c1) <= 0.0)
                throw std::domain_error("hamiltonian: (q,Jq) <= 0 outside hyperbolic domain");
            const T R = R_value_t(x.q, p);
            if (deep_value(R) <= detail::singular_r_floor)
                throw std::domain_error("hamiltonian: at/inside singular set (R <= 0)");
            return kin + p.mu * sqrt(c1) / sqrt(R);
        }
        default: {
            const T kin =
                0.5 * (x.M.x1 * x.M.x1 + x.M.x2 * x.M.x2 - x.M.x3 * x.M.x3);
            if (p.mu == 0.0) return kin;
            const T n2 = T{} - dot_j(x.q, x.q, Signature::Lorentzian);
            if (deep_value(n2) <= 0.0)
                throw std::domain_error("hamiltonian: (q,Jq) >= 0 outside de Sitter domain");
            const T R = R_value_t(x.q, p);
            if (deep_value(R) <= detail::singular_r_floor)
                throw std::domain_error("hamiltonian: at/inside singular set (R <= 0)");
            return kin + p.mu * sqrt(n2) / sqrt(R);
        }
    }
}

inline double hamiltonian(const PhasePoint& x, const SystemParams& p) {
    return hamiltonian_t(x, p);
}

/// The second integral F, quadratic in M with coefficients algebraic in q.
template <typename T>
T integral_F_t(const PhasePointT<T>& x, const SystemParams& p) {
    using std::sqrt;
    const double s = std::sqrt(std::abs(p.A) * p.B);
    switch (p.model) {
        case Model::Spherical: {
            const T nq = sqrt(dot(x.q, x.q));
            T out = p.A * x.M.x1 * x.M.x1 + p.B * x.M.x2 * x.M.x2 +
                    (2.0 * s / nq) * dot(x.M, x.q) * x.M.x3;
            if (p.mu != 0.0) {
                const T R = R_value_t(x.q, p);
                if (deep_value(R) <= detail::singular_r_floor)
                    throw std::domain_error("integral_F: at/inside singular set (R <= 0)");
                out = out - 2.0 * p.mu * s * x.q.x3 / sqrt(R);
            }
            return out;
        }
        case Model::Hyperbolic: {
            const T nq = sqrt(dot_j(x.q, x.q, Signature::Lorentzian));
            T out = p.A * x.M.x1 * x.M.x1 + p.B * x.M.x2 * x.M.x2 -
                    (2.0 * s / nq) * dot_j(x.M, x.q, Signature::Lorentzian) * x.M.x3;
            if (p.mu != 0.0) {
                const T R = R_value_t(x.q, p);
                if (deep_value(R) <= detail::singular_r_floor)
                    throw std::domain_error("integral_F: at/inside singular set (R <= 0)");
                out = out + 2.0 * p.mu * s * x.q.x3 / sqrt(R);
            }
            return out;
        }
        default: {
            const T n = sqrt(T{} - dot_j(x.q, x.q, Signature::Lorentzian));
            T out = p.A * x.M.x1 * x.M.x1 + p.B * x.M.x2 * x.M.x2 -
                    (2.0 * s / n) * dot_j(x.M, x.q, Signature::Lorentzian) * x.M.x3;
            if (p.mu != 0.0) {
                const T R = R_value_t(x.q, p);
                if (deep_value(R) <= detail::singular_r_floor)
                    throw std::domain_error("integral_F: at/inside singular set (R <= 0)");
                out = out + 2.0 * p.mu * s * x.q.x3 / sqrt(R);
            }
            return out;
        }
    }
}

inline double integral_F(const PhasePoint& x, const SystemParams& p) {
    return integral_F_t(x, p);
}

/// The two singular centres on the unit leaf (q2 = 0 at both, R = 0).
struct Centres {
    Vec3 plus;
    Vec3 minus;
};

inline Centres centres(const SystemParams& p) {
    p.validate();
    double c1;
    switch (p.model) {
        case Model::Spherical: c1 = std::sqrt((p.A - p.B) / p.A); break;
        case Model::Hyperbolic: c1 = std::sqrt((p.B - p.A) / p.A); break;
        default:
            throw std::domain_error("centres: de Sitter singular set not parameterized");
    }
    const double c3 = std::sqrt(p.B / p.A);
    return {Vec3{c1, 0.0, c3}, Vec3{-c1, 0.0, c3}};
}

/// Evaluate U at spherical distance rho from the + centre, along a great
/// circle in direction of `transverse` (q2 direction) or in the q1q3 plane,
/// together with the Coulomb model -mu / (sqrt(A-B) rho).
///
/// The model constant is the verified Taylor coefficient R ~ (A-B) rho^2
/// (isotropic to leading order), matching the stated point charge mu/sqrt(A-B).
struct CoulombCheck {
    double numeric_u;
    double model_u;
};

inline CoulombCheck coulomb_asymptotics_check(const SystemParams& p, double rho,
                                              bool transverse = false) {
    p.validate();
    if (p.model != Model::Spherical)
        throw std::invalid_argument("coulomb_asymptotics_check: spherical model only");
    const Vec3 c = centres(p).plus;
    const Vec3 t = transverse ? Vec3{0.0, 1.0, 0.0} : Vec3{-c.x3, 0.0, c.x1};
    const Vec3 q = std::cos(rho) * c + std::sin(rho) * t;
    const double u_num = -p.mu / std::sqrt(R_value(q, p));
    const double u_model = -p.mu / (std::sqrt(p.A - p.B) * rho);
    return {u_num, u_model};
}

/// Killing two-centre baseline on the unit sphere; centres at (+-alpha, 0, beta).
struct KillingParams {
    double mu = 1.0;
    double alpha = 0.6;
    double beta = 0.8;

    void validate() const {
        if (std::abs(alpha * alpha + beta * beta - 1.0) > 1e-12)
            throw std::invalid_argument("KillingParams: alpha^2 + beta^2 must be 1");
    }
};

template <typename T>
T killing_hamiltonian_t(const PhasePointT<T>& x, const KillingParams& kp) {
    using std::sqrt;
    const T kin = 0.5 * dot(x.M, x.M);
    if (kp.mu == 0.0) return kin;
    const auto& q = x.q;
    const T wm = kp.alpha * q.x3 + kp.beta * q.x1;  // inner of sin(theta-)
    const T wp = kp.alpha * q.x3 - kp.beta * q.x1;  // inner of sin(theta+)
    const T dm2 = q.x2 * q.x2 + wm * wm;
    const T dp2 = q.x2 * q.x2 + wp * wp;
    if (deep_value(dm2) <= 0.0 || deep_value(dp2) <= 0.0)
        throw std::domain_error("killing_hamiltonian: vanishing square-root argument");
    return kin - kp.mu * (kp.beta * q.x3 - kp.alpha * q.x1) / sqrt(dm2) -
           kp.mu * (kp.beta * q.x3 + kp.alpha * q.x1) / sqrt(dp2);
}

inline double killing_hamiltonian(const PhasePoint& x, const KillingParams& kp) {
    return killing_hamiltonian_t(x, kp);
}

/// Quadratic integral of the Killing system on the (M,q)=0 leaf.
///
/// With t+- = beta q1 -+ alpha q3:
///   F = alpha^2 M1^2 - beta^2 M3^2
///       + 2 alpha beta mu [ t+ / sqrt(q2^2 + t+^2) - t- / sqrt(q2^2 + t-^2) ].
/// This is the literature display with its two known sign misprints repaired;
/// the bracket {H,F} vanishes on the (M,q)=0 leaf and only there.
template <typename T>
T mamaev_integral_t(const PhasePointT<T>& x, const KillingParams& kp) {
    using std::sqrt;
    const auto& q = x.q;
    const T quad = kp.alpha * kp.alpha * x.M.x1 * x.M.x1 -
                   kp.beta * kp.beta * x.M.x3 * x.M.x3;
    if (kp.mu == 0.0) return quad;
    const T tp = kp.beta * q.x1 - kp.alpha * q.x3;
    const T tm = kp.beta * q.x1 + kp.alpha * q.x3;
    const T dp2 = q.x2 * q.x2 + tp * tp;
    const T dm2 = q.x2 * q.x2 + tm * tm;
    if (deep_value(dp2) <= 0.0 || deep_value(dm2) <= 0.0)
        throw std::domain_error("mamaev_integral: vanishing square-root argument");
    return quad + 2.0 * kp.alpha * kp.beta * kp.mu * (tp / sqrt(dp2) - tm / sqrt(dm2));
}

inline double mamaev_integral(const PhasePoint& x, const KillingParams& kp) {
    return mamaev_integral_t(x, kp);
}

}  // namespace twocentre
